#pragma once

// One Monte-Carlo runner per limit theorem. A run is a pure function of
// (setup, seed): every replica draws from its own derived stream and results
// are reduced in replica order, so the worker count never changes the output.
//
// Scalings follow the theorem statements: prefix means sum(xi)/n for the
// almost-sure and L1 runners, sum(xi)/sqrt(n) for the distributional runner,
// and partial sums of xi_k / sqrt(n) for the random walk.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qlimit/channels.hpp"
#include "qlimit/density.hpp"
#include "qlimit/random.hpp"
#include "qlimit/report.hpp"

namespace qlimit {

enum class Theorem {
  slln_kernel,
  clt_kernel,
  slln_wot,
  clt_wot,
  l1_wot,
  random_walk,
  impulse_slln,
  impulse_clt,
  impulse_l1,
  impulse_walk,
};

enum class Family { almost_sure, distribution, l1, random_walk };

const char* to_string(Theorem t);
std::optional<Theorem> theorem_from_string(const std::string& s);
const std::vector<Theorem>& all_theorems();
Family family(Theorem t);
Channel channel(Theorem t);

struct Tolerances {
  double level = 0.01;            // significance level of KS / mean tests
  double decay_factor = 5.0;      // required error ratio, smallest n over largest n
  double max_final_error = 0.02;  // a.s. runner: median error bound at the largest n
  double zero_tolerance = 1e-9;   // errors below this count as exactly zero
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct Probe {
  std::string label;
  std::variant<KernelPoint, BoundedOperator> target;
};

// Fully resolved inputs of a run.
struct ExperimentSetup {
  std::string name;
  Theorem theorem = Theorem::slln_kernel;
  WaveFunction initial{GridSpec{}, std::vector<cplx>(4)};
  DistributionSpec distribution;
  std::vector<std::size_t> n_schedule;
  std::size_t replicas = 1;
  std::vector<Probe> probes;
  std::vector<double> times;
  CompositionPath composition = CompositionPath::collapsed;
  Tolerances tolerances;
};

// Throws ErrorCode::config when the setup violates a runner precondition
// (zero mean for distributional runs, d = 1 for random walks, wrap-around
// budget of the limit state, schedule shape, ...).
void check_setup(const ExperimentSetup& setup);

// True when the probe's value cannot depend on the channel parameter:
// frequency kernels on the diagonal under shifts, position kernels on the
// diagonal under impulses, multiplication operators under impulses.
bool is_vacuous(Channel channel, const GridSpec& grid, const Probe& probe);

// Default worker count: QLIMIT_WORKERS if set to a positive integer,
// otherwise the number of logical cores.
unsigned default_workers();

ConvergenceReport run_experiment(const ExperimentSetup& setup, std::uint64_t seed, unsigned workers);

}  // namespace qlimit
