#include "qlimit/experiments.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "qlimit/error.hpp"

namespace qlimit {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::config, what); }

// Replicas are independent; each writes only its own slot, so the schedule
// (static or dynamic) cannot influence the results.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  const std::size_t threads = std::min<std::size_t>(std::max(1U, workers), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct Evaluation {
  std::vector<cplx> values;
  double drift = 0.0;
  bool wrapped = false;
};

struct ResolvedProbe {
  bool kernel = false;
  Domain domain = Domain::position;
  std::size_t i = 0;
  std::size_t j = 0;
  const BoundedOperator* op = nullptr;
};

// Evaluates every probe on C_a u for one channel family.
class ProbeEvaluator {
 public:
  ProbeEvaluator(const ExperimentSetup& setup)
      : orbit_(channel(setup.theorem), setup.initial),
        position_moments_(packet_moments(setup.initial)),
        frequency_moments_(packet_moments(orbit_.initial_spectrum())) {
    const GridSpec& grid = setup.initial.grid();
    for (const auto& probe : setup.probes) {
      ResolvedProbe r;
      if (const auto* k = std::get_if<KernelPoint>(&probe.target)) {
        r.kernel = true;
        r.domain = k->domain;
        r.i = locate(grid, k->domain, k->x);
        r.j = locate(grid, k->domain, k->y);
        (k->domain == Domain::position ? needs_position_ : needs_frequency_) = true;
      } else {
        r.op = &std::get<BoundedOperator>(probe.target);
        needs_position_ = true;
      }
      probes_.push_back(r);
    }
  }

  const ChannelOrbit& orbit() const { return orbit_; }

  Evaluation at(std::span<const double> a) const {
    std::optional<WaveFunction> pos, freq;
    if (needs_position_) pos = orbit_.state(a);
    if (needs_frequency_) freq = orbit_.spectrum(a);
    Evaluation e = evaluate(pos, freq);
    e.wrapped = exceeds_budget(a);
    return e;
  }

  Evaluation at_sequential(const std::vector<Vector>& steps) const {
    const auto d = static_cast<std::size_t>(orbit_.initial().grid().dim);
    std::optional<WaveFunction> pos = compose(orbit_.channel(), orbit_.initial(), steps, CompositionPath::sequential);
    std::optional<WaveFunction> freq;
    if (needs_frequency_) freq = fourier(*pos);
    Evaluation e = evaluate(pos, freq);
    Vector total(d, 0.0);
    for (const auto& s : steps)
      for (std::size_t i = 0; i < d; ++i) total[i] += s[i];
    e.wrapped = exceeds_budget(total);
    return e;
  }

  // Shifts move the packet centre to c - a and must keep 6 rms widths inside
  // [-L, L); impulses move the spectral centre to p + a and must keep it
  // inside the Nyquist band.
  bool exceeds_budget(std::span<const double> a) const {
    const GridSpec& grid = orbit_.initial().grid();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (orbit_.channel() == Channel::shift) {
        if (std::abs(position_moments_.center[i] - a[i]) + 6.0 * position_moments_.spread[i] > grid.half_width)
          return true;
      } else {
        if (std::abs(frequency_moments_.center[i] + a[i]) + 6.0 * frequency_moments_.spread[i] > grid.nyquist())
          return true;
      }
    }
    return false;
  }

 private:
  Evaluation evaluate(const std::optional<WaveFunction>& pos, const std::optional<WaveFunction>& freq) const {
    Evaluation e;
    e.values.reserve(probes_.size());
    for (const auto& p : probes_) {
      if (p.kernel) {
        const WaveFunction& w = p.domain == Domain::position ? *pos : *freq;
        e.values.push_back(w[p.i] * std::conj(w[p.j]));
      } else {
        e.values.push_back(expectation(*pos, *p.op));
      }
    }
    e.drift = std::abs(norm(pos ? *pos : *freq) - 1.0);
    return e;
  }

  ChannelOrbit orbit_;
  PacketMoments position_moments_;
  PacketMoments frequency_moments_;
  std::vector<ResolvedProbe> probes_;
  bool needs_position_ = false;
  bool needs_frequency_ = false;
};

struct ReplicaOut {
  std::vector<cplx> values;     // rows x probes
  std::vector<cplx> reference;  // rows x probes (distributional runners)
  std::vector<cplx> cross;      // probes (random walk cross-check)
  std::size_t evaluations = 0;
  std::size_t wraps = 0;
  double drift = 0.0;

  void record(const Evaluation& e, std::vector<cplx>& into, std::size_t offset) {
    std::copy(e.values.begin(), e.values.end(), into.begin() + static_cast<std::ptrdiff_t>(offset));
    ++evaluations;
    wraps += e.wrapped ? 1 : 0;
    drift = std::max(drift, e.drift);
  }
};

ComponentSummary summarize(std::span<const double> xs, double confidence) {
  if (xs.size() >= 2) return mean_with_ci(xs, confidence);
  ComponentSummary s;
  s.mean = s.ci_lo = s.ci_hi = xs.empty() ? 0.0 : xs.front();
  return s;
}

bool is_constant(std::span<const double> xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi - *lo <= 1e-12 * std::max({1.0, std::abs(*lo), std::abs(*hi)});
}

double mean_of(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

DistributionTest compare_distributions(std::span<const double> xs, std::span<const double> ys,
                                       const Tolerances& tol) {
  DistributionTest t;
  t.n = xs.size();
  t.m = ys.size();
  if (is_constant(xs) && is_constant(ys)) {
    t.constant = true;
    t.passed = std::abs(mean_of(xs) - mean_of(ys)) <= tol.zero_tolerance;
    t.statistic = t.passed ? 0.0 : 1.0;
    t.p_value = t.passed ? 1.0 : 0.0;
    return t;
  }
  const KSResult ks = ks_two_sample(xs, ys);
  t.statistic = ks.statistic;
  t.p_value = ks.p_value;
  t.passed = ks.p_value >= tol.level;
  return t;
}

MeanTest mean_against_target(std::span<const double> xs, double target, const Tolerances& tol) {
  MeanTest m;
  m.target = target;
  const ComponentSummary s = summarize(xs, 1.0 - tol.level);
  if (is_constant(xs)) {
    m.method = "constant";
    m.passed = std::abs(s.mean - target) <= tol.zero_tolerance;
    m.statistic = s.mean - target;
    m.p_value = m.passed ? 1.0 : 0.0;
    return m;
  }
  m.method = "ci_covers_target";
  m.statistic = (s.mean - target) / s.std_error;
  boost::math::normal standard;
  m.p_value = 2.0 * boost::math::cdf(boost::math::complement(standard, std::abs(m.statistic)));
  m.passed = s.covers(target);
  return m;
}

MeanTest mean_against_reference(std::span<const double> xs, std::span<const double> ys, const Tolerances& tol) {
  MeanTest m;
  if (is_constant(xs) && is_constant(ys)) {
    m.method = "constant";
    m.statistic = mean_of(xs) - mean_of(ys);
    m.passed = std::abs(m.statistic) <= tol.zero_tolerance;
    m.p_value = m.passed ? 1.0 : 0.0;
    return m;
  }
  m.method = "welch";
  const WelchResult w = welch_test(xs, ys);
  m.statistic = w.statistic;
  m.p_value = w.p_value;
  m.passed = w.p_value >= tol.level;
  return m;
}

// Column `probe` of a rows x probes block, across replicas, split into parts.
struct Column {
  std::vector<double> re;
  std::vector<double> im;
  std::vector<cplx> z;
};

Column gather(const std::vector<ReplicaOut>& outs, std::vector<cplx> ReplicaOut::*field, std::size_t offset) {
  Column c;
  for (const auto& o : outs) {
    const cplx v = (o.*field)[offset];
    c.re.push_back(v.real());
    c.im.push_back(v.imag());
    c.z.push_back(v);
  }
  return c;
}

std::string n_label(std::size_t n) { return "n=" + std::to_string(n); }

struct RunContext {
  const ExperimentSetup& setup;
  const ProbeEvaluator& evaluator;
  SeedPolicy policy;
  unsigned workers;
  std::vector<bool> vacuous;
};

void absorb(ConvergenceReport& report, const std::vector<ReplicaOut>& outs) {
  for (const auto& o : outs) {
    report.evaluated_states += o.evaluations;
    report.wrap_exceedances += o.wraps;
    report.max_norm_drift = std::max(report.max_norm_drift, o.drift);
  }
}

Vector scaled(const Vector& v, double factor) {
  Vector out(v);
  for (auto& x : out) x *= factor;
  return out;
}

// Error-decay verdict shared by the a.s. and L1 runners.
bool decays(double first, double last, const Tolerances& tol) {
  if (first <= tol.zero_tolerance) return last <= tol.zero_tolerance;
  return last * tol.decay_factor < first || last <= tol.zero_tolerance;
}

void run_almost_sure(const RunContext& ctx, ConvergenceReport& report) {
  const auto& setup = ctx.setup;
  const Sampler sampler(setup.distribution);
  const std::size_t rows = setup.n_schedule.size();
  const std::size_t probes = setup.probes.size();
  const std::size_t n_max = setup.n_schedule.back();
  const bool sequential = setup.composition == CompositionPath::sequential;

  std::vector<ReplicaOut> outs(setup.replicas);
  parallel_for(setup.replicas, ctx.workers, [&](std::size_t r) {
    ReplicaOut& out = outs[r];
    out.values.resize(rows * probes);
    Rng rng = ctx.policy.derive("slln/path", r);
    Vector acc(static_cast<std::size_t>(sampler.dim()), 0.0);
    std::vector<Vector> draws;
    std::size_t row = 0;
    for (std::size_t i = 1; i <= n_max; ++i) {
      if (sequential) {
        draws.push_back(sampler.draw(rng));
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += draws.back()[k];
      } else {
        sampler.accumulate(rng, acc);
      }
      if (i != setup.n_schedule[row]) continue;
      const double inv = 1.0 / static_cast<double>(i);
      if (sequential) {
        std::vector<Vector> steps;
        for (const auto& x : draws) steps.push_back(scaled(x, inv));
        out.record(ctx.evaluator.at_sequential(steps), out.values, row * probes);
      } else {
        out.record(ctx.evaluator.at(scaled(acc, inv)), out.values, row * probes);
      }
      ++row;
    }
  });
  absorb(report, outs);

  const Vector mu = mean_cov(setup.distribution).mean;
  const Evaluation limit = ctx.evaluator.at(mu);
  const Tolerances& tol = setup.tolerances;

  for (std::size_t p = 0; p < probes; ++p) {
    ProbeReport& pr = report.probes[p];
    pr.limit = limit.values[p];
    for (std::size_t row = 0; row < rows; ++row) {
      const Column col = gather(outs, &ReplicaOut::values, row * probes + p);
      const auto errors = path_error_sequence(col.z, limit.values[p]);
      ProbeRow pr_row;
      pr_row.at = static_cast<double>(setup.n_schedule[row]);
      pr_row.median_error = median(errors);
      pr_row.max_error = *std::max_element(errors.begin(), errors.end());
      pr_row.mean_error = summarize(errors, 1.0 - tol.level);
      for (double q : {0.1, 0.5, 0.9}) pr_row.error_quantiles.push_back(quantile(errors, q));
      pr_row.passed = row + 1 < rows || *pr_row.median_error <= tol.max_final_error;
      pr.rows.push_back(std::move(pr_row));
    }
    if (ctx.vacuous[p]) continue;
    const double first = *pr.rows.front().median_error;
    const double last = *pr.rows.back().median_error;
    std::ostringstream why;
    why.precision(6);
    const bool bounded = pr.rows.back().passed;
    const bool decayed = rows < 2 || decays(first, last, tol);
    why << "median path error " << first << " at n=" << setup.n_schedule.front() << " -> " << last
        << " at n=" << setup.n_schedule.back();
    if (!decayed) why << "; decay by factor " << tol.decay_factor << " not reached";
    if (!bounded) why << "; final error above " << tol.max_final_error;
    pr.verdict = decayed && bounded ? Verdict::pass : Verdict::fail;
    pr.reason = why.str();
  }
}

void run_l1(const RunContext& ctx, ConvergenceReport& report) {
  const auto& setup = ctx.setup;
  const Sampler sampler(setup.distribution);
  const std::size_t rows = setup.n_schedule.size();
  const std::size_t probes = setup.probes.size();
  const bool sequential = setup.composition == CompositionPath::sequential;

  std::vector<ReplicaOut> outs(setup.replicas);
  parallel_for(setup.replicas, ctx.workers, [&](std::size_t r) {
    ReplicaOut& out = outs[r];
    out.values.resize(rows * probes);
    for (std::size_t row = 0; row < rows; ++row) {
      const std::size_t n = setup.n_schedule[row];
      Rng rng = ctx.policy.derive("l1/" + n_label(n), r);
      const double inv = 1.0 / static_cast<double>(n);
      if (sequential) {
        std::vector<Vector> steps;
        for (std::size_t i = 0; i < n; ++i) steps.push_back(scaled(sampler.draw(rng), inv));
        out.record(ctx.evaluator.at_sequential(steps), out.values, row * probes);
      } else {
        Vector acc(static_cast<std::size_t>(sampler.dim()), 0.0);
        for (std::size_t i = 0; i < n; ++i) sampler.accumulate(rng, acc);
        out.record(ctx.evaluator.at(scaled(acc, inv)), out.values, row * probes);
      }
    }
  });
  absorb(report, outs);

  const Evaluation limit = ctx.evaluator.at(mean_cov(setup.distribution).mean);
  const Tolerances& tol = setup.tolerances;

  for (std::size_t p = 0; p < probes; ++p) {
    ProbeReport& pr = report.probes[p];
    pr.limit = limit.values[p];
    double worst = 0.0;
    for (std::size_t row = 0; row < rows; ++row) {
      const Column col = gather(outs, &ReplicaOut::values, row * probes + p);
      const auto errors = path_error_sequence(col.z, limit.values[p]);
      ProbeRow pr_row;
      pr_row.at = static_cast<double>(setup.n_schedule[row]);
      pr_row.median_error = median(errors);
      pr_row.max_error = *std::max_element(errors.begin(), errors.end());
      pr_row.mean_error = summarize(errors, 1.0 - tol.level);
      for (double q : {0.1, 0.5, 0.9}) pr_row.error_quantiles.push_back(quantile(errors, q));
      worst = std::max(worst, *pr_row.max_error);
      pr_row.passed = !pr.operator_norm_bound || *pr_row.max_error <= 2.0 * *pr.operator_norm_bound + 1e-12;
      pr.rows.push_back(std::move(pr_row));
    }
    if (ctx.vacuous[p]) continue;
    const double first = pr.rows.front().mean_error->mean;
    const double last = pr.rows.back().mean_error->mean;
    const bool decayed = rows < 2 || decays(first, last, tol);
    const bool bounded = std::all_of(pr.rows.begin(), pr.rows.end(), [](const ProbeRow& r) { return r.passed; });
    std::ostringstream why;
    why.precision(6);
    why << "E|delta| " << first << " at n=" << setup.n_schedule.front() << " -> " << last
        << " at n=" << setup.n_schedule.back();
    if (!decayed) why << "; decay by factor " << tol.decay_factor << " not reached";
    if (!bounded) why << "; |delta| exceeded 2 ||A|| (max " << worst << ")";
    pr.verdict = decayed && bounded ? Verdict::pass : Verdict::fail;
    pr.reason = why.str();
  }
}

// Closed-form limit of the replica mean where the averaged phase is the
// Gaussian characteristic function: frequency kernels under shifts, position
// kernels under impulses.
std::optional<cplx> gaussian_damped_target(const ExperimentSetup& setup, const Eigen::MatrixXd& cov,
                                           const Probe& probe) {
  const auto* k = std::get_if<KernelPoint>(&probe.target);
  if (k == nullptr) return std::nullopt;
  const Channel c = channel(setup.theorem);
  const bool matches = (c == Channel::shift && k->domain == Domain::frequency) ||
                       (c == Channel::impulse && k->domain == Domain::position);
  if (!matches) return std::nullopt;
  const GridSpec& grid = setup.initial.grid();
  const WaveFunction base = k->domain == Domain::position ? setup.initial : fourier(setup.initial);
  const cplx value = base[locate(grid, k->domain, k->x)] * std::conj(base[locate(grid, k->domain, k->y)]);
  Eigen::VectorXd d(grid.dim);
  for (int i = 0; i < grid.dim; ++i)
    d(i) = k->x[static_cast<std::size_t>(i)] - k->y[static_cast<std::size_t>(i)];
  return std::exp(-0.5 * d.dot(cov * d)) * value;
}

void run_distribution(const RunContext& ctx, ConvergenceReport& report) {
  const auto& setup = ctx.setup;
  const Sampler sampler(setup.distribution);
  const Eigen::MatrixXd cov = mean_cov(setup.distribution).cov;
  const Sampler reference(GaussianLaw{Vector(static_cast<std::size_t>(sampler.dim()), 0.0), cov});
  const std::size_t rows = setup.n_schedule.size();
  const std::size_t probes = setup.probes.size();
  const bool sequential = setup.composition == CompositionPath::sequential;

  std::vector<ReplicaOut> outs(setup.replicas);
  parallel_for(setup.replicas, ctx.workers, [&](std::size_t r) {
    ReplicaOut& out = outs[r];
    out.values.resize(rows * probes);
    out.reference.resize(rows * probes);
    for (std::size_t row = 0; row < rows; ++row) {
      const std::size_t n = setup.n_schedule[row];
      const double inv = 1.0 / std::sqrt(static_cast<double>(n));
      Rng rng = ctx.policy.derive("clt/compose/" + n_label(n), r);
      if (sequential) {
        std::vector<Vector> steps;
        for (std::size_t i = 0; i < n; ++i) steps.push_back(scaled(sampler.draw(rng), inv));
        out.record(ctx.evaluator.at_sequential(steps), out.values, row * probes);
      } else {
        Vector acc(static_cast<std::size_t>(sampler.dim()), 0.0);
        for (std::size_t i = 0; i < n; ++i) sampler.accumulate(rng, acc);
        out.record(ctx.evaluator.at(scaled(acc, inv)), out.values, row * probes);
      }
      Rng ref_rng = ctx.policy.derive("clt/reference/" + n_label(n), r);
      out.record(ctx.evaluator.at(reference.draw(ref_rng)), out.reference, row * probes);
    }
  });
  absorb(report, outs);

  const Tolerances& tol = setup.tolerances;
  const double confidence = 1.0 - tol.level;
  for (std::size_t p = 0; p < probes; ++p) {
    ProbeReport& pr = report.probes[p];
    const auto target = gaussian_damped_target(setup, cov, setup.probes[p]);
    for (std::size_t row = 0; row < rows; ++row) {
      const Column val = gather(outs, &ReplicaOut::values, row * probes + p);
      const Column ref = gather(outs, &ReplicaOut::reference, row * probes + p);
      ProbeRow pr_row;
      pr_row.at = static_cast<double>(setup.n_schedule[row]);
      pr_row.value_re = summarize(val.re, confidence);
      pr_row.value_im = summarize(val.im, confidence);
      pr_row.reference_re = summarize(ref.re, confidence);
      pr_row.reference_im = summarize(ref.im, confidence);
      pr_row.ks_re = compare_distributions(val.re, ref.re, tol);
      pr_row.ks_im = compare_distributions(val.im, ref.im, tol);
      if (target) {
        pr_row.mean_re = mean_against_target(val.re, target->real(), tol);
        pr_row.mean_im = mean_against_target(val.im, target->imag(), tol);
      } else {
        pr_row.mean_re = mean_against_reference(val.re, ref.re, tol);
        pr_row.mean_im = mean_against_reference(val.im, ref.im, tol);
      }
      pr_row.passed = pr_row.ks_re->passed && pr_row.ks_im->passed && pr_row.mean_re->passed &&
                      pr_row.mean_im->passed;
      pr.rows.push_back(std::move(pr_row));
    }
    if (target) pr.limit = *target;
    if (ctx.vacuous[p]) continue;
    const bool ok = std::all_of(pr.rows.begin(), pr.rows.end(), [](const ProbeRow& r) { return r.passed; });
    pr.verdict = ok ? Verdict::pass : Verdict::fail;
    pr.reason = ok ? "KS and mean tests accept at every n"
                   : "KS or mean test rejects at level " + std::to_string(tol.level);
  }
}

void run_random_walk(const RunContext& ctx, ConvergenceReport& report) {
  const auto& setup = ctx.setup;
  const std::size_t n = setup.n_schedule.front();
  const TriangularArray array(setup.distribution, n);
  const Eigen::MatrixXd cov = mean_cov(setup.distribution).cov;
  const Sampler limit_law(GaussianLaw{Vector{0.0}, cov});
  const std::size_t rows = setup.times.size();
  const std::size_t probes = setup.probes.size();
  const bool sequential = setup.composition == CompositionPath::sequential;
  const bool cross = std::find(setup.times.begin(), setup.times.end(), 1.0) != setup.times.end();

  std::vector<ReplicaOut> outs(setup.replicas);
  parallel_for(setup.replicas, ctx.workers, [&](std::size_t r) {
    ReplicaOut& out = outs[r];
    out.values.resize(rows * probes);
    out.reference.resize(rows * probes);
    out.cross.resize(probes);

    Rng rng = ctx.policy.derive("walk/path", r);
    const std::vector<double> row = array.row(rng);
    std::vector<double> partial(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) partial[k + 1] = partial[k] + row[k];

    std::map<std::size_t, Evaluation> cache;
    auto node = [&](std::size_t k) -> const Evaluation& {
      auto it = cache.find(k);
      if (it != cache.end()) return it->second;
      Evaluation e;
      if (sequential) {
        std::vector<Vector> steps;
        for (std::size_t i = 0; i < k; ++i) steps.push_back(Vector{row[i]});
        e = ctx.evaluator.at_sequential(steps);
      } else {
        e = ctx.evaluator.at(Vector{partial[k]});
      }
      ++out.evaluations;
      out.wraps += e.wrapped ? 1 : 0;
      out.drift = std::max(out.drift, e.drift);
      return cache.emplace(k, std::move(e)).first->second;
    };

    // Polygonal line through (k/n, g_k), g_0 = value on the initial state.
    for (std::size_t ti = 0; ti < rows; ++ti) {
      const double pos = setup.times[ti] * static_cast<double>(n);
      const auto k0 = std::min(static_cast<std::size_t>(std::floor(pos)), n);
      const double frac = pos - static_cast<double>(k0);
      const Evaluation& g0 = node(k0);
      for (std::size_t p = 0; p < probes; ++p) out.values[ti * probes + p] = g0.values[p];
      if (frac > 0.0 && k0 < n) {
        const Evaluation& g1 = node(k0 + 1);
        for (std::size_t p = 0; p < probes; ++p)
          out.values[ti * probes + p] = (1.0 - frac) * g0.values[p] + frac * g1.values[p];
      }
    }

    Rng wiener_rng = ctx.policy.derive("walk/wiener", r);
    const std::vector<double> w = wiener_path(setup.times, wiener_rng);
    for (std::size_t ti = 0; ti < rows; ++ti)
      out.record(ctx.evaluator.at(Vector{w[ti]}), out.reference, ti * probes);

    if (cross) {
      Rng eta_rng = ctx.policy.derive("walk/clt_reference", r);
      out.record(ctx.evaluator.at(limit_law.draw(eta_rng)), out.cross, 0);
    }
  });
  absorb(report, outs);

  const Tolerances& tol = setup.tolerances;
  const double confidence = 1.0 - tol.level;
  for (std::size_t p = 0; p < probes; ++p) {
    ProbeReport& pr = report.probes[p];
    for (std::size_t ti = 0; ti < rows; ++ti) {
      const Column val = gather(outs, &ReplicaOut::values, ti * probes + p);
      const Column ref = gather(outs, &ReplicaOut::reference, ti * probes + p);
      ProbeRow pr_row;
      pr_row.at = setup.times[ti];
      pr_row.value_re = summarize(val.re, confidence);
      pr_row.value_im = summarize(val.im, confidence);
      pr_row.reference_re = summarize(ref.re, confidence);
      pr_row.reference_im = summarize(ref.im, confidence);
      pr_row.ks_re = compare_distributions(val.re, ref.re, tol);
      pr_row.ks_im = compare_distributions(val.im, ref.im, tol);
      pr_row.passed = pr_row.ks_re->passed && pr_row.ks_im->passed;
      if (setup.times[ti] == 1.0) {
        const Column eta = gather(outs, &ReplicaOut::cross, p);
        pr_row.cross_check_re = compare_distributions(val.re, eta.re, tol);
        pr_row.cross_check_im = compare_distributions(val.im, eta.im, tol);
        pr_row.passed = pr_row.passed && pr_row.cross_check_re->passed && pr_row.cross_check_im->passed;
      }
      pr.rows.push_back(std::move(pr_row));
    }
    if (ctx.vacuous[p]) continue;
    const bool ok = std::all_of(pr.rows.begin(), pr.rows.end(), [](const ProbeRow& r) { return r.passed; });
    pr.verdict = ok ? Verdict::pass : Verdict::fail;
    pr.reason = ok ? "marginal KS tests accept at every t"
                   : "a marginal KS test rejects at level " + std::to_string(tol.level);
  }
}

const char* mode_name(Family f) {
  switch (f) {
    case Family::almost_sure: return "almost_sure";
    case Family::distribution: return "distribution";
    case Family::l1: return "l1";
    case Family::random_walk: return "random_walk";
  }
  return "unknown";
}

}  // namespace

const std::vector<Theorem>& all_theorems() {
  static const std::vector<Theorem> all = {
      Theorem::slln_kernel, Theorem::clt_kernel,   Theorem::slln_wot,    Theorem::clt_wot,
      Theorem::l1_wot,      Theorem::random_walk,  Theorem::impulse_slln, Theorem::impulse_clt,
      Theorem::impulse_l1,  Theorem::impulse_walk,
  };
  return all;
}

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::slln_kernel: return "slln_kernel";
    case Theorem::clt_kernel: return "clt_kernel";
    case Theorem::slln_wot: return "slln_wot";
    case Theorem::clt_wot: return "clt_wot";
    case Theorem::l1_wot: return "l1_wot";
    case Theorem::random_walk: return "random_walk";
    case Theorem::impulse_slln: return "impulse_slln";
    case Theorem::impulse_clt: return "impulse_clt";
    case Theorem::impulse_l1: return "impulse_l1";
    case Theorem::impulse_walk: return "impulse_walk";
  }
  return "unknown";
}

std::optional<Theorem> theorem_from_string(const std::string& s) {
  for (Theorem t : all_theorems())
    if (s == to_string(t)) return t;
  return std::nullopt;
}

Family family(Theorem t) {
  switch (t) {
    case Theorem::slln_kernel:
    case Theorem::slln_wot:
    case Theorem::impulse_slln: return Family::almost_sure;
    case Theorem::clt_kernel:
    case Theorem::clt_wot:
    case Theorem::impulse_clt: return Family::distribution;
    case Theorem::l1_wot:
    case Theorem::impulse_l1: return Family::l1;
    case Theorem::random_walk:
    case Theorem::impulse_walk: return Family::random_walk;
  }
  return Family::almost_sure;
}

Channel channel(Theorem t) {
  switch (t) {
    case Theorem::impulse_slln:
    case Theorem::impulse_clt:
    case Theorem::impulse_l1:
    case Theorem::impulse_walk: return Channel::impulse;
    default: return Channel::shift;
  }
}

bool is_vacuous(Channel c, const GridSpec& grid, const Probe& probe) {
  if (const auto* k = std::get_if<KernelPoint>(&probe.target)) {
    const bool diagonal = locate(grid, k->domain, k->x) == locate(grid, k->domain, k->y);
    if (!diagonal) return false;
    return (c == Channel::shift && k->domain == Domain::frequency) ||
           (c == Channel::impulse && k->domain == Domain::position);
  }
  return c == Channel::impulse && std::get<BoundedOperator>(probe.target).is_multiplication();
}

unsigned default_workers() {
  if (const char* env = std::getenv("QLIMIT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void check_setup(const ExperimentSetup& setup) {
  const GridSpec& grid = setup.initial.grid();
  const Family fam = family(setup.theorem);
  if (setup.initial.domain() != Domain::position) config_error("initial_state: must be a position-domain state");
  if (std::abs(norm(setup.initial) - 1.0) > 1e-10) config_error("initial_state: must be normalized");
  try {
    validate(setup.distribution);
  } catch (const Error& e) {
    config_error(std::string("distribution: ") + e.what());
  }
  if (dimension(setup.distribution) != grid.dim)
    config_error("distribution: dimension " + std::to_string(dimension(setup.distribution)) +
                 " does not match grid dimension " + std::to_string(grid.dim));

  if (setup.n_schedule.empty()) config_error("n_schedule: must not be empty");
  for (std::size_t i = 0; i < setup.n_schedule.size(); ++i) {
    if (setup.n_schedule[i] == 0) config_error("n_schedule: entries must be positive");
    if (i > 0 && setup.n_schedule[i] <= setup.n_schedule[i - 1])
      config_error("n_schedule: must be strictly increasing");
  }
  if (setup.composition == CompositionPath::sequential && setup.n_schedule.back() > 1000)
    config_error("composition: sequential composition is limited to n <= 1000");

  if (setup.replicas < 1) config_error("replicas: must be at least 1");
  if ((fam == Family::distribution || fam == Family::random_walk) && setup.replicas < 8)
    config_error("replicas: distributional runs need at least 8 replicas for the KS test");
  if (fam == Family::l1 && setup.replicas < 2) config_error("replicas: L1 runs need at least 2 replicas");
  if (setup.probes.empty()) config_error("probes: at least one probe is required");

  const Tolerances& tol = setup.tolerances;
  if (!(tol.level > 0.0 && tol.level < 1.0)) config_error("tolerances.level: must lie in (0, 1)");
  if (!(tol.decay_factor >= 1.0)) config_error("tolerances.decay_factor: must be at least 1");
  if (!(tol.max_final_error > 0.0)) config_error("tolerances.max_final_error: must be positive");
  if (!(tol.zero_tolerance >= 0.0)) config_error("tolerances.zero_tolerance: must be nonnegative");

  const MeanCov mc = mean_cov(setup.distribution);
  if (fam == Family::distribution) {
    for (double m : mc.mean)
      if (std::abs(m) > 1e-12)
        config_error("distribution: central-limit runs require zero-mean random vectors (hypothesis of the "
                     "central limit theorem); got mean component " + std::to_string(m));
  }
  if (fam == Family::random_walk) {
    if (grid.dim != 1) config_error("grid.dim: random-walk runs require d = 1");
    if (setup.n_schedule.size() != 1) config_error("n_schedule: random-walk runs take exactly one row length");
    if (std::abs(mc.mean[0]) > 1e-12 || std::abs(mc.cov(0, 0) - 1.0) > 1e-12)
      config_error("distribution: random-walk base law must have mean 0 and variance 1");
    if (setup.times.empty()) config_error("times: random-walk runs need at least one time");
    for (std::size_t i = 0; i < setup.times.size(); ++i) {
      const double t = setup.times[i];
      if (!(t >= 0.0 && t <= 1.0)) config_error("times: every time must lie in [0, 1]");
      if (i > 0 && !(t > setup.times[i - 1])) config_error("times: must be strictly increasing");
    }
  } else if (!setup.times.empty()) {
    config_error("times: only random-walk runs take times");
  }

  for (std::size_t i = 0; i < setup.probes.size(); ++i) {
    const Probe& probe = setup.probes[i];
    const std::string where = "probes[" + std::to_string(i) + "] '" + probe.label + "'";
    if (const auto* k = std::get_if<KernelPoint>(&probe.target)) {
      try {
        locate(grid, k->domain, k->x);
        locate(grid, k->domain, k->y);
      } catch (const Error& e) {
        config_error(where + ": " + e.what());
      }
    } else if (!(std::get<BoundedOperator>(probe.target).grid() == grid)) {
      config_error(where + ": operator lives on a different grid");
    }
  }

  // The deterministic limit state itself must fit in the box.
  ExperimentSetup probe_free = setup;
  probe_free.probes.clear();
  const ProbeEvaluator budget(probe_free);
  const Vector origin(static_cast<std::size_t>(grid.dim), 0.0);
  const Vector& anchor = (fam == Family::almost_sure || fam == Family::l1) ? mc.mean : origin;
  if (budget.exceeds_budget(anchor))
    config_error("wrap-around budget exceeded: the limit state does not fit in the periodic box "
                 "(|centre displacement| + 6 rms widths must stay below L, or below the Nyquist "
                 "frequency for impulses)");
}

ConvergenceReport run_experiment(const ExperimentSetup& setup, std::uint64_t seed, unsigned workers) {
  check_setup(setup);
  const GridSpec& grid = setup.initial.grid();
  const Channel ch = channel(setup.theorem);
  const Family fam = family(setup.theorem);

  ConvergenceReport report;
  report.library_version = library_version();
  report.name = setup.name;
  report.theorem = to_string(setup.theorem);
  report.channel = to_string(ch);
  report.mode = mode_name(fam);
  report.seed = seed;
  report.replicas = setup.replicas;

  const ProbeEvaluator evaluator(setup);
  RunContext ctx{setup, evaluator, SeedPolicy{seed}, std::max(1U, workers), {}};
  for (const auto& probe : setup.probes) {
    ProbeReport pr;
    pr.label = probe.label;
    pr.kind = std::holds_alternative<KernelPoint>(probe.target) ? "kernel" : "operator";
    if (const auto* op = std::get_if<BoundedOperator>(&probe.target)) pr.operator_norm_bound = op->operator_norm_bound();
    const bool vacuous = is_vacuous(ch, grid, probe);
    ctx.vacuous.push_back(vacuous);
    if (vacuous) {
      pr.verdict = Verdict::vacuous;
      pr.reason = "probe value does not depend on the channel parameter";
    }
    report.probes.push_back(std::move(pr));
  }

  switch (fam) {
    case Family::almost_sure: run_almost_sure(ctx, report); break;
    case Family::distribution: run_distribution(ctx, report); break;
    case Family::l1: run_l1(ctx, report); break;
    case Family::random_walk: run_random_walk(ctx, report); break;
  }

  if (report.wrap_exceedances > 0) {
    std::ostringstream os;
    os << report.wrap_exceedances << " of " << report.evaluated_states
       << " evaluated states exceed the wrap-around budget";
    report.warnings.push_back(os.str());
  }
  for (const auto& pr : report.probes)
    if (pr.verdict == Verdict::vacuous) report.warnings.push_back("probe '" + pr.label + "' is vacuous");
  report.passed = std::all_of(report.probes.begin(), report.probes.end(),
                              [](const ProbeReport& p) { return p.verdict != Verdict::fail; });
  return report;
}

}  // namespace qlimit
