#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qlimit {

struct ComponentSummary {
  double mean = 0.0;
  double sd = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;

  bool covers(double value) const { return ci_lo <= value && value <= ci_hi; }
  friend bool operator==(const ComponentSummary&, const ComponentSummary&) = default;
};

struct SampleSummary {
  std::size_t n = 0;
  double confidence = 0.0;
  ComponentSummary re;
  ComponentSummary im;
  std::vector<double> quantiles;  // of the real part at 0.1, 0.25, 0.5, 0.75, 0.9

  std::complex<double> mean() const { return {re.mean, im.mean}; }
};

// Mean +- z sd / sqrt(n), two-sided normal quantile z at `confidence`.
// Complex samples are summarised per component. Needs n >= 2.
ComponentSummary mean_with_ci(std::span<const double> samples, double confidence);
SampleSummary mean_with_ci(std::span<const std::complex<double>> samples, double confidence);

// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> samples, double q);
double median(std::vector<double> samples);

// Right-continuous empirical CDF of a sample.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples);
  double operator()(double x) const;
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

struct KSResult {
  double statistic = 0.0;  // D
  std::size_t n = 0;
  std::size_t m = 0;
  double p_value = 1.0;
};

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

// Two-sample Kolmogorov-Smirnov test. D is the largest gap between the two
// right-continuous ECDFs over the pooled sample; the p-value is the
// asymptotic Kolmogorov tail at sqrt(nm/(n+m)) D. Needs n, m >= 8.
KSResult ks_two_sample(std::span<const double> xs, std::span<const double> ys);

struct WelchResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Welch's two-sample t-test for equal means (two-sided). Needs n, m >= 2 and
// a nonzero pooled standard error.
WelchResult welch_test(std::span<const double> xs, std::span<const double> ys);

// (1/n) sum_k exp(i (t, x_k)).
std::complex<double> empirical_char_function(std::span<const std::vector<double>> samples,
                                             std::span<const double> t);

// |value_n - target| elementwise.
std::vector<double> path_error_sequence(std::span<const std::complex<double>> values,
                                        std::complex<double> target);

// Two-sided standard normal quantile for a confidence level, e.g. 0.99 -> 2.5758.
double normal_critical_value(double confidence);

}  // namespace qlimit
