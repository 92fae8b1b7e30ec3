#pragma once

// ConvergenceReport: everything a run produced, self-contained enough that
// each verdict can be re-derived from the recorded numbers. Serialized as
// report.json (round-trips exactly) plus one CSV per probe.

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qlimit/statistics.hpp"

namespace qlimit {

inline constexpr int kReportFormatVersion = 1;
const char* library_version();

enum class Verdict { pass, fail, vacuous };
const char* to_string(Verdict v);

// One real component (real or imaginary part) compared between two samples.
// `constant` marks both samples degenerate; then the comparison is exact
// equality within the zero tolerance and statistic/p_value are 0/1.
struct DistributionTest {
  bool constant = false;
  double statistic = 0.0;  // KS D
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;
  bool passed = false;
  friend bool operator==(const DistributionTest&, const DistributionTest&) = default;
};

// Mean agreement for one component. method is "ci_covers_target", "welch"
// or "constant".
struct MeanTest {
  std::string method;
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> target;
  bool passed = false;
  friend bool operator==(const MeanTest&, const MeanTest&) = default;
};

struct ProbeRow {
  double at = 0.0;  // n (composition length) or t (random walk time)

  // a.s. and L1 modes: per-replica |value - limit|
  std::optional<double> median_error;
  std::optional<double> max_error;
  std::optional<ComponentSummary> mean_error;
  std::vector<double> error_quantiles;  // 0.1, 0.5, 0.9

  // distributional modes
  std::optional<ComponentSummary> value_re;
  std::optional<ComponentSummary> value_im;
  std::optional<ComponentSummary> reference_re;
  std::optional<ComponentSummary> reference_im;
  std::optional<DistributionTest> ks_re;
  std::optional<DistributionTest> ks_im;
  std::optional<MeanTest> mean_re;
  std::optional<MeanTest> mean_im;
  // random walk at t = 1 against the Gaussian-limit reference
  std::optional<DistributionTest> cross_check_re;
  std::optional<DistributionTest> cross_check_im;

  bool passed = false;
  friend bool operator==(const ProbeRow&, const ProbeRow&) = default;
};

struct ProbeReport {
  std::string label;
  std::string kind;  // "kernel" or "operator"
  Verdict verdict = Verdict::fail;
  std::string reason;
  std::optional<std::complex<double>> limit;
  std::optional<double> operator_norm_bound;
  std::vector<ProbeRow> rows;
  friend bool operator==(const ProbeReport&, const ProbeReport&) = default;
};

struct ConvergenceReport {
  int format_version = kReportFormatVersion;
  std::string library_version;
  std::string name;
  std::string theorem;
  std::string channel;
  std::string mode;  // "almost_sure", "distribution", "l1"
  std::uint64_t seed = 0;
  std::size_t replicas = 0;
  std::size_t evaluated_states = 0;
  std::size_t wrap_exceedances = 0;
  double max_norm_drift = 0.0;
  std::vector<std::string> warnings;
  std::vector<ProbeReport> probes;
  bool passed = false;
  nlohmann::json config;  // echo of the experiment configuration
  friend bool operator==(const ConvergenceReport&, const ConvergenceReport&) = default;
};

nlohmann::json to_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(const nlohmann::json& j);

// Canonical text of report.json (2-space indent, trailing newline).
std::string dump_report(const ConvergenceReport& report);

// Fixed CSV header for a theorem family: first column "n" or "t", second
// "error" (a.s./L1) or "statistic" (distributional), then
// ci_lo, ci_hi, ks_D, ks_p.
std::string csv_header(const ConvergenceReport& report);
std::string probe_csv(const ConvergenceReport& report, std::size_t probe_index);
std::string csv_file_name(std::size_t probe_index);

// Writes report.json and probe_XX.csv files into `dir` (created if needed).
void write_report(const ConvergenceReport& report, const std::filesystem::path& dir);

}  // namespace qlimit
