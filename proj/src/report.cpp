#include "qlimit/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qlimit/error.hpp"

namespace qlimit {

using nlohmann::json;

namespace {

json cplx_json(const std::complex<double>& z) { return json{{"re", z.real()}, {"im", z.imag()}}; }
std::complex<double> cplx_from(const json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

json summary_json(const ComponentSummary& s) {
  return json{{"mean", s.mean}, {"sd", s.sd}, {"std_error", s.std_error}, {"ci_lo", s.ci_lo}, {"ci_hi", s.ci_hi}};
}
ComponentSummary summary_from(const json& j) {
  return ComponentSummary{j.at("mean").get<double>(), j.at("sd").get<double>(), j.at("std_error").get<double>(),
                          j.at("ci_lo").get<double>(), j.at("ci_hi").get<double>()};
}

json dist_json(const DistributionTest& t) {
  return json{{"constant", t.constant}, {"statistic", t.statistic}, {"p_value", t.p_value},
              {"n", t.n},               {"m", t.m},                 {"passed", t.passed}};
}
DistributionTest dist_from(const json& j) {
  DistributionTest t;
  t.constant = j.at("constant").get<bool>();
  t.statistic = j.at("statistic").get<double>();
  t.p_value = j.at("p_value").get<double>();
  t.n = j.at("n").get<std::size_t>();
  t.m = j.at("m").get<std::size_t>();
  t.passed = j.at("passed").get<bool>();
  return t;
}

json mean_json(const MeanTest& t) {
  json j{{"method", t.method}, {"statistic", t.statistic}, {"p_value", t.p_value}, {"passed", t.passed}};
  j["target"] = t.target ? json(*t.target) : json(nullptr);
  return j;
}
MeanTest mean_from(const json& j) {
  MeanTest t;
  t.method = j.at("method").get<std::string>();
  t.statistic = j.at("statistic").get<double>();
  t.p_value = j.at("p_value").get<double>();
  t.passed = j.at("passed").get<bool>();
  if (!j.at("target").is_null()) t.target = j.at("target").get<double>();
  return t;
}

template <class T, class F>
void put(json& j, const char* key, const std::optional<T>& v, F&& conv) {
  j[key] = v ? conv(*v) : json(nullptr);
}

template <class T, class F>
void get(const json& j, const char* key, std::optional<T>& v, F&& conv) {
  const json& x = j.at(key);
  if (x.is_null()) v.reset();
  else v = conv(x);
}

json row_json(const ProbeRow& r) {
  json j;
  j["at"] = r.at;
  auto num = [](double x) { return json(x); };
  put(j, "median_error", r.median_error, num);
  put(j, "max_error", r.max_error, num);
  put(j, "mean_error", r.mean_error, summary_json);
  j["error_quantiles"] = r.error_quantiles;
  put(j, "value_re", r.value_re, summary_json);
  put(j, "value_im", r.value_im, summary_json);
  put(j, "reference_re", r.reference_re, summary_json);
  put(j, "reference_im", r.reference_im, summary_json);
  put(j, "ks_re", r.ks_re, dist_json);
  put(j, "ks_im", r.ks_im, dist_json);
  put(j, "mean_re", r.mean_re, mean_json);
  put(j, "mean_im", r.mean_im, mean_json);
  put(j, "cross_check_re", r.cross_check_re, dist_json);
  put(j, "cross_check_im", r.cross_check_im, dist_json);
  j["passed"] = r.passed;
  return j;
}

ProbeRow row_from(const json& j) {
  ProbeRow r;
  r.at = j.at("at").get<double>();
  auto num = [](const json& x) { return x.get<double>(); };
  get(j, "median_error", r.median_error, num);
  get(j, "max_error", r.max_error, num);
  get(j, "mean_error", r.mean_error, summary_from);
  r.error_quantiles = j.at("error_quantiles").get<std::vector<double>>();
  get(j, "value_re", r.value_re, summary_from);
  get(j, "value_im", r.value_im, summary_from);
  get(j, "reference_re", r.reference_re, summary_from);
  get(j, "reference_im", r.reference_im, summary_from);
  get(j, "ks_re", r.ks_re, dist_from);
  get(j, "ks_im", r.ks_im, dist_from);
  get(j, "mean_re", r.mean_re, mean_from);
  get(j, "mean_im", r.mean_im, mean_from);
  get(j, "cross_check_re", r.cross_check_re, dist_from);
  get(j, "cross_check_im", r.cross_check_im, dist_from);
  r.passed = j.at("passed").get<bool>();
  return r;
}

Verdict verdict_from(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "vacuous") return Verdict::vacuous;
  throw Error(ErrorCode::invalid_argument, "unknown verdict '" + s + "'");
}

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}


}  // namespace

const char* library_version() { return "1.0.0"; }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::vacuous: return "vacuous";
  }
  return "fail";
}

json to_json(const ConvergenceReport& r) {
  json j;
  j["format_version"] = r.format_version;
  j["library_version"] = r.library_version;
  j["name"] = r.name;
  j["theorem"] = r.theorem;
  j["channel"] = r.channel;
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["replicas"] = r.replicas;
  j["evaluated_states"] = r.evaluated_states;
  j["wrap_exceedances"] = r.wrap_exceedances;
  j["max_norm_drift"] = r.max_norm_drift;
  j["warnings"] = r.warnings;
  j["passed"] = r.passed;
  j["config"] = r.config;
  json probes = json::array();
  for (const auto& p : r.probes) {
    json pj;
    pj["label"] = p.label;
    pj["kind"] = p.kind;
    pj["verdict"] = to_string(p.verdict);
    pj["reason"] = p.reason;
    put(pj, "limit", p.limit, cplx_json);
    put(pj, "operator_norm_bound", p.operator_norm_bound, [](double x) { return json(x); });
    json rows = json::array();
    for (const auto& row : p.rows) rows.push_back(row_json(row));
    pj["rows"] = std::move(rows);
    probes.push_back(std::move(pj));
  }
  j["probes"] = std::move(probes);
  return j;
}

ConvergenceReport report_from_json(const json& j) {
  try {
    ConvergenceReport r;
    r.format_version = j.at("format_version").get<int>();
    if (r.format_version != kReportFormatVersion)
      throw Error(ErrorCode::invalid_argument, "unsupported report format version");
    r.library_version = j.at("library_version").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.theorem = j.at("theorem").get<std::string>();
    r.channel = j.at("channel").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.replicas = j.at("replicas").get<std::size_t>();
    r.evaluated_states = j.at("evaluated_states").get<std::size_t>();
    r.wrap_exceedances = j.at("wrap_exceedances").get<std::size_t>();
    r.max_norm_drift = j.at("max_norm_drift").get<double>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.passed = j.at("passed").get<bool>();
    r.config = j.at("config");
    for (const auto& pj : j.at("probes")) {
      ProbeReport p;
      p.label = pj.at("label").get<std::string>();
      p.kind = pj.at("kind").get<std::string>();
      p.verdict = verdict_from(pj.at("verdict").get<std::string>());
      p.reason = pj.at("reason").get<std::string>();
      get(pj, "limit", p.limit, cplx_from);
      get(pj, "operator_norm_bound", p.operator_norm_bound, [](const json& x) { return x.get<double>(); });
      for (const auto& row : pj.at("rows")) p.rows.push_back(row_from(row));
      r.probes.push_back(std::move(p));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed report: ") + e.what());
  }
}

std::string dump_report(const ConvergenceReport& report) { return to_json(report).dump(2) + "\n"; }

std::string csv_header(const ConvergenceReport& report) {
  const bool walk = report.mode == "random_walk";
  const bool errors = report.mode == "almost_sure" || report.mode == "l1";
  return std::string(walk ? "t" : "n") + "," + (errors ? "error" : "statistic") + ",ci_lo,ci_hi,ks_D,ks_p";
}

// a.s. and L1:     error = mean path error |value - limit|, with its CI
//                  (the median used by the a.s. verdict is in report.json)
// distributional:  statistic = replica mean of the real part, with its CI;
//                  ks_D / ks_p = worst of the real and imaginary KS tests
std::string probe_csv(const ConvergenceReport& report, std::size_t probe_index) {
  const ProbeReport& p = report.probes.at(probe_index);
  std::ostringstream os;
  os << csv_header(report) << "\n";
  for (const auto& r : p.rows) {
    std::string value, lo, hi, ks_d, ks_p;
    if (r.mean_error) {
      value = number(r.mean_error->mean);
      lo = number(r.mean_error->ci_lo);
      hi = number(r.mean_error->ci_hi);
    } else if (r.value_re) {
      value = number(r.value_re->mean);
      lo = number(r.value_re->ci_lo);
      hi = number(r.value_re->ci_hi);
    }
    if (r.ks_re) {
      double d = r.ks_re->statistic;
      double pv = r.ks_re->p_value;
      if (r.ks_im) {
        d = std::max(d, r.ks_im->statistic);
        pv = std::min(pv, r.ks_im->p_value);
      }
      ks_d = number(d);
      ks_p = number(pv);
    }
    os << number(r.at) << "," << value << "," << lo << "," << hi << "," << ks_d << "," << ks_p << "\n";
  }
  return os.str();
}

std::string csv_file_name(std::size_t probe_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "probe_%02zu.csv", probe_index);
  return buf;
}

void write_report(const ConvergenceReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [&](const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + file.string());
    out << text;
    if (!out) throw Error(ErrorCode::io, "failed writing " + file.string());
  };
  write(dir / "report.json", dump_report(report));
  for (std::size_t i = 0; i < report.probes.size(); ++i) write(dir / csv_file_name(i), probe_csv(report, i));
}

}  // namespace qlimit
