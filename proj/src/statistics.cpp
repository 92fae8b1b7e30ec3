#include "qlimit/statistics.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qlimit/error.hpp"

namespace qlimit {

double normal_critical_value(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw Error(ErrorCode::invalid_argument, "confidence must lie in (0, 1)");
  boost::math::normal standard;
  return boost::math::quantile(boost::math::complement(standard, 0.5 * (1.0 - confidence)));
}

ComponentSummary mean_with_ci(std::span<const double> samples, double confidence) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "mean_with_ci needs at least two samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  ComponentSummary s;
  s.mean = mean;
  s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  s.std_error = s.sd / std::sqrt(static_cast<double>(n));
  const double z = normal_critical_value(confidence);
  s.ci_lo = mean - z * s.std_error;
  s.ci_hi = mean + z * s.std_error;
  return s;
}

SampleSummary mean_with_ci(std::span<const std::complex<double>> samples, double confidence) {
  std::vector<double> re(samples.size()), im(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    re[i] = samples[i].real();
    im[i] = samples[i].imag();
  }
  SampleSummary s;
  s.n = samples.size();
  s.confidence = confidence;
  s.re = mean_with_ci(re, confidence);
  s.im = mean_with_ci(im, confidence);
  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) s.quantiles.push_back(quantile(re, q));
  return s;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::invalid_argument, "quantile level must lie in [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

double median(std::vector<double> samples) { return quantile(std::move(samples), 0.5); }

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw Error(ErrorCode::invalid_argument, "ECDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.0) {
    // P(K <= l) = sqrt(2 pi)/l sum_k exp(-(2k-1)^2 pi^2 / (8 l^2)); converges fast for small l.
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * pi * pi / (8.0 * lambda * lambda));
      cdf += term;
      if (term < 1e-300) break;
    }
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double tail = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    tail += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(tail, 0.0, 1.0);
}

KSResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 8 || ys.size() < 8)
    throw Error(ErrorCode::invalid_argument, "ks_two_sample needs at least 8 observations per sample");
  std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());

  // Walk the pooled sorted values; after consuming every copy of the current
  // value from both samples, both ECDFs are evaluated right-continuously there.
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  // Once one sample is exhausted its ECDF is 1; the gap only shrinks from here.
  d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));

  KSResult r;
  r.statistic = d;
  r.n = a.size();
  r.m = b.size();
  r.p_value = kolmogorov_survival(std::sqrt(n * m / (n + m)) * d);
  return r;
}

WelchResult welch_test(std::span<const double> xs, std::span<const double> ys) {
  const auto sx = mean_with_ci(xs, 0.5);
  const auto sy = mean_with_ci(ys, 0.5);
  const double vx = sx.std_error * sx.std_error;
  const double vy = sy.std_error * sy.std_error;
  const double se = std::sqrt(vx + vy);
  if (!(se > 0.0)) throw Error(ErrorCode::invalid_argument, "welch_test needs a nonzero standard error");
  WelchResult r;
  r.statistic = (sx.mean - sy.mean) / se;
  const double nx = static_cast<double>(xs.size());
  const double ny = static_cast<double>(ys.size());
  r.dof = (vx + vy) * (vx + vy) / (vx * vx / (nx - 1.0) + vy * vy / (ny - 1.0));
  boost::math::students_t dist(r.dof);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
  return r;
}

std::complex<double> empirical_char_function(std::span<const std::vector<double>> samples,
                                             std::span<const double> t) {
  if (samples.empty()) throw Error(ErrorCode::invalid_argument, "empirical_char_function of an empty sample");
  std::complex<double> acc{0.0, 0.0};
  for (const auto& x : samples) {
    if (x.size() != t.size()) throw Error(ErrorCode::invalid_argument, "sample and argument differ in dimension");
    double phase = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) phase += t[i] * x[i];
    acc += std::polar(1.0, phase);
  }
  return acc / static_cast<double>(samples.size());
}

std::vector<double> path_error_sequence(std::span<const std::complex<double>> values,
                                        std::complex<double> target) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(std::abs(v - target));
  return out;
}

}  // namespace qlimit
