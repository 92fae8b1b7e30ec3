#pragma once

// Experiment configuration file: a single JSON document. Schema (every field
// is required unless marked optional):
//
// {
//   "format_version": 1,
//   "name": "slln_kernel_rademacher",
//   "theorem": "slln_kernel",              // one of the ten theorem tags
//   "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
//   "initial_state": <state>,
//   "distribution": <law>,
//   "n_schedule": [100, 1000, 10000],      // strictly increasing
//   "replicas": 50,
//   "probes": [<probe>, ...],
//   "times": [0.25, 0.5, 1.0],             // random-walk runs only
//   "composition": "collapsed",            // optional: "collapsed" | "sequential"
//   "tolerances": {...},                   // optional, see below
//   "seed": 12345                          // optional default master seed
// }
//
// <state>:  {"kind": "gaussian", "center": [..], "width": w, "momentum": [..] (optional)}
//         | {"kind": "file", "path": "samples.txt"}  (N^d lines "re im", path relative
//                                                     to the config file)
//         | {"kind": "initial"}                      (the run's initial state)
// <law>:    {"kind": "gaussian", "mean": [..], "cov": [[..], ..]}
//         | {"kind": "uniform_box", "lo": [..], "hi": [..]}
//         | {"kind": "rademacher", "scale": [..], "offset": [..]}
//         | {"kind": "discrete", "atoms": [[..], ..], "probs": [..]}
// <probe>:  {"label": "...", "kind": "kernel", "domain": "position"|"frequency",
//            "x": [..], "y": [..]}
//         | {"label": "...", "kind": "operator", "operator": <operator>}
// <operator>: {"kind": "identity"}
//         | {"kind": "halfspace_indicator", "axis": 0, "threshold": 0.0}   (x_axis > threshold; 1/2 on the edge)
//         | {"kind": "box_indicator", "lo": [..], "hi": [..]}              (lo < x < hi; 1/2 per edge)
//         | {"kind": "projector", "state": <state>}                        (state is normalized)
//         | {"kind": "rank_one", "v": <state>, "w": <state>}               (|v><w|)
//         | {"kind": "finite_matrix", "basis": [<state>, ..], "re": [[..]], "im": [[..]] (optional)}
//
// Tolerance defaults: level 0.01, decay_factor 5, max_final_error 0.02,
// zero_tolerance 1e-9.
//
// Initial states are normalized numerically after sampling.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qlimit/experiments.hpp"

namespace qlimit {

struct GaussianStateSpec {
  std::vector<double> center;
  double width = 1.0;
  std::vector<double> momentum;
  friend bool operator==(const GaussianStateSpec&, const GaussianStateSpec&) = default;
};
struct FileStateSpec {
  std::string path;
  friend bool operator==(const FileStateSpec&, const FileStateSpec&) = default;
};
struct InitialStateRef {
  friend bool operator==(const InitialStateRef&, const InitialStateRef&) = default;
};
using StateSpec = std::variant<GaussianStateSpec, FileStateSpec, InitialStateRef>;

struct ExperimentConfig {
  int format_version = 1;
  std::string name;
  Theorem theorem = Theorem::slln_kernel;
  GridSpec grid;
  StateSpec initial_state;
  nlohmann::json distribution;
  std::vector<std::size_t> n_schedule;
  std::size_t replicas = 1;
  nlohmann::json probes;  // kept as JSON, resolved against the grid
  std::vector<double> times;
  CompositionPath composition = CompositionPath::collapsed;
  Tolerances tolerances;
  std::optional<std::uint64_t> seed;
  std::filesystem::path base_dir;  // where relative state files are looked up
};

// Schema-level parsing. Errors carry ErrorCode::config and name the field
// ("config error at 'grid.points': ...") or the line/column of a JSON syntax
// error.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON echo (the form stored in reports).
nlohmann::json to_json(const ExperimentConfig& config);

DistributionSpec parse_distribution(const nlohmann::json& j, const std::string& where = "distribution");

// Builds every object the run needs and applies all runner preconditions.
ExperimentSetup resolve(const ExperimentConfig& config);

// resolve() without keeping the result.
void validate_config(const ExperimentConfig& config);

ConvergenceReport run_config(const ExperimentConfig& config, std::uint64_t seed, unsigned workers);

// Reads a state file: one "re im" pair per line, '#' comments allowed.
std::vector<cplx> read_samples(const std::filesystem::path& path);

}  // namespace qlimit
