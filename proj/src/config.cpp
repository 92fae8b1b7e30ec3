#include "qlimit/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "qlimit/error.hpp"

namespace qlimit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::config, "config error at '" + where + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.contains(key)) fail(join(where, key), "unknown field");
}

const json& member(const json& j, const std::string& where, const char* key) {
  require_object(j, where);
  auto it = j.find(key);
  if (it == j.end()) fail(join(where, key), "missing field");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

std::uint64_t unsigned_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    fail(where, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(where, i)));
  return out;
}

std::vector<double> vector_of_dim(const json& j, const std::string& where, int dim) {
  auto v = vector(j, where);
  if (v.size() != static_cast<std::size_t>(dim))
    fail(where, "expected " + std::to_string(dim) + " components, got " + std::to_string(v.size()));
  return v;
}

std::vector<std::vector<double>> rows(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector(j[i], index(where, i)));
  return out;
}

Eigen::MatrixXd square_matrix(const json& j, const std::string& where, std::size_t size) {
  const auto r = rows(j, where);
  if (r.size() != size) fail(where, "expected " + std::to_string(size) + " rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) {
    if (r[i].size() != size) fail(index(where, i), "expected " + std::to_string(size) + " columns");
    for (std::size_t k = 0; k < size; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = r[i][k];
  }
  return m;
}

StateSpec parse_state_spec(const json& j, const std::string& where) {
  const std::string kind = string(member(j, where, "kind"), join(where, "kind"));
  if (kind == "gaussian") {
    only_keys(j, where, {"kind", "center", "width", "momentum"});
    GaussianStateSpec g;
    g.center = vector(member(j, where, "center"), join(where, "center"));
    g.width = number(member(j, where, "width"), join(where, "width"));
    if (!(g.width > 0.0)) fail(join(where, "width"), "must be positive");
    if (j.contains("momentum")) {
      g.momentum = vector(j["momentum"], join(where, "momentum"));
      if (g.momentum.size() != g.center.size()) fail(join(where, "momentum"), "must match the centre dimension");
    }
    return g;
  }
  if (kind == "file") {
    only_keys(j, where, {"kind", "path"});
    return FileStateSpec{string(member(j, where, "path"), join(where, "path"))};
  }
  if (kind == "initial") {
    only_keys(j, where, {"kind"});
    return InitialStateRef{};
  }
  fail(join(where, "kind"), "unknown state kind '" + kind + "' (expected gaussian, file or initial)");
}

json state_to_json(const StateSpec& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GaussianStateSpec>) {
          json j{{"kind", "gaussian"}, {"center", v.center}, {"width", v.width}};
          if (!v.momentum.empty()) j["momentum"] = v.momentum;
          return j;
        } else if constexpr (std::is_same_v<T, FileStateSpec>) {
          return json{{"kind", "file"}, {"path", v.path}};
        } else {
          return json{{"kind", "initial"}};
        }
      },
      s);
}

struct Resolver {
  const GridSpec& grid;
  const std::filesystem::path& base_dir;
  const WaveFunction* initial = nullptr;

  WaveFunction state(const json& j, const std::string& where) const {
    const StateSpec spec = parse_state_spec(j, where);
    try {
      if (const auto* g = std::get_if<GaussianStateSpec>(&spec)) {
        if (g->center.size() != static_cast<std::size_t>(grid.dim))
          fail(join(where, "center"), "expected " + std::to_string(grid.dim) + " components");
        return gaussian_packet(grid, g->center, g->width, g->momentum);
      }
      if (const auto* f = std::get_if<FileStateSpec>(&spec)) {
        std::filesystem::path p(f->path);
        if (p.is_relative()) p = base_dir / p;
        return WaveFunction(grid, read_samples(p), Domain::position);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config) throw;
      fail(where, e.what());
    }
    if (initial == nullptr) fail(where, "'initial' cannot be used for the initial state itself");
    return *initial;
  }

  WaveFunction normalized_state(const json& j, const std::string& where) const {
    try {
      return normalize(state(j, where));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config) throw;
      fail(where, e.what());
    }
  }

  // Indicator sample at signed distance t from an edge: a node on the edge
  // gets 1/2, the midpoint value of the jump, so grid sums of |u|^2 m match
  // the integral to the rule's usual order.
  static double step_weight(double t, double h) {
    if (std::abs(t) <= 1e-9 * h) return 0.5;
    return t > 0 ? 1.0 : 0.0;
  }

  BoundedOperator op(const json& j, const std::string& where) const {
    const std::string kind = string(member(j, where, "kind"), join(where, "kind"));
    const std::size_t size = grid.size();
    try {
      if (kind == "identity") {
        only_keys(j, where, {"kind"});
        return BoundedOperator::identity(grid);
      }
      if (kind == "halfspace_indicator") {
        only_keys(j, where, {"kind", "axis", "threshold"});
        const auto axis = unsigned_integer(member(j, where, "axis"), join(where, "axis"));
        if (axis >= static_cast<std::uint64_t>(grid.dim)) fail(join(where, "axis"), "axis out of range");
        const double threshold = number(member(j, where, "threshold"), join(where, "threshold"));
        std::vector<cplx> m(size);
        for (std::size_t i = 0; i < size; ++i)
          m[i] = step_weight(coordinates(grid, Domain::position, i)[axis] - threshold, grid.spacing());
        return BoundedOperator(grid, Multiplication{std::move(m)});
      }
      if (kind == "box_indicator") {
        only_keys(j, where, {"kind", "lo", "hi"});
        const auto lo = vector_of_dim(member(j, where, "lo"), join(where, "lo"), grid.dim);
        const auto hi = vector_of_dim(member(j, where, "hi"), join(where, "hi"), grid.dim);
        std::vector<cplx> m(size);
        for (std::size_t i = 0; i < size; ++i) {
          const auto x = coordinates(grid, Domain::position, i);
          double w = 1.0;
          for (std::size_t a = 0; a < x.size(); ++a)
            w *= step_weight(x[a] - lo[a], grid.spacing()) * step_weight(hi[a] - x[a], grid.spacing());
          m[i] = w;
        }
        return BoundedOperator(grid, Multiplication{std::move(m)});
      }
      if (kind == "projector") {
        only_keys(j, where, {"kind", "state"});
        return BoundedOperator::projector(normalized_state(member(j, where, "state"), join(where, "state")));
      }
      if (kind == "rank_one") {
        only_keys(j, where, {"kind", "v", "w"});
        return BoundedOperator(grid, RankOne{state(member(j, where, "v"), join(where, "v")),
                                             state(member(j, where, "w"), join(where, "w"))});
      }
      if (kind == "finite_matrix") {
        only_keys(j, where, {"kind", "basis", "re", "im"});
        const json& basis_json = member(j, where, "basis");
        if (!basis_json.is_array() || basis_json.empty()) fail(join(where, "basis"), "expected a nonempty array");
        FiniteMatrix f;
        for (std::size_t i = 0; i < basis_json.size(); ++i)
          f.basis.push_back(state(basis_json[i], index(join(where, "basis"), i)));
        const auto k = f.basis.size();
        const Eigen::MatrixXd re = square_matrix(member(j, where, "re"), join(where, "re"), k);
        Eigen::MatrixXd im = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        if (j.contains("im")) im = square_matrix(j["im"], join(where, "im"), k);
        f.matrix = re.cast<cplx>() + cplx{0.0, 1.0} * im.cast<cplx>();
        return BoundedOperator(grid, std::move(f));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config) throw;
      fail(where, e.what());
    }
    fail(join(where, "kind"), "unknown operator kind '" + kind + "'");
  }

  Probe probe(const json& j, const std::string& where) const {
    Probe p;
    p.label = string(member(j, where, "label"), join(where, "label"));
    const std::string kind = string(member(j, where, "kind"), join(where, "kind"));
    const std::string named = where + " '" + p.label + "'";
    if (kind == "kernel") {
      only_keys(j, where, {"label", "kind", "domain", "x", "y"});
      const std::string domain = string(member(j, where, "domain"), join(where, "domain"));
      KernelPoint k;
      if (domain == "position") k.domain = Domain::position;
      else if (domain == "frequency") k.domain = Domain::frequency;
      else fail(join(where, "domain"), "expected 'position' or 'frequency'");
      k.x = vector_of_dim(member(j, where, "x"), join(where, "x"), grid.dim);
      k.y = vector_of_dim(member(j, where, "y"), join(where, "y"), grid.dim);
      try {
        locate(grid, k.domain, k.x);
        locate(grid, k.domain, k.y);
      } catch (const Error& e) {
        fail(named, std::string("probe is off the grid: ") + e.what());
      }
      p.target = std::move(k);
    } else if (kind == "operator") {
      only_keys(j, where, {"label", "kind", "operator"});
      p.target = op(member(j, where, "operator"), join(where, "operator"));
    } else {
      fail(join(where, "kind"), "expected 'kernel' or 'operator'");
    }
    return p;
  }
};

}  // namespace

std::vector<cplx> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open state file " + path.string());
  std::vector<cplx> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    double re = 0.0;
    double im = 0.0;
    if (!(is >> re)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(ErrorCode::config, path.string() + ":" + std::to_string(line_no) + ": expected 're im'");
    }
    if (!(is >> im)) im = 0.0;
    out.emplace_back(re, im);
  }
  return out;
}

DistributionSpec parse_distribution(const json& j, const std::string& where) {
  const std::string kind = string(member(j, where, "kind"), join(where, "kind"));
  DistributionSpec spec;
  if (kind == "gaussian") {
    only_keys(j, where, {"kind", "mean", "cov"});
    GaussianLaw g;
    g.mean = vector(member(j, where, "mean"), join(where, "mean"));
    g.cov = square_matrix(member(j, where, "cov"), join(where, "cov"), g.mean.size());
    spec = g;
  } else if (kind == "uniform_box") {
    only_keys(j, where, {"kind", "lo", "hi"});
    spec = UniformBoxLaw{vector(member(j, where, "lo"), join(where, "lo")),
                         vector(member(j, where, "hi"), join(where, "hi"))};
  } else if (kind == "rademacher") {
    only_keys(j, where, {"kind", "scale", "offset"});
    spec = RademacherLaw{vector(member(j, where, "scale"), join(where, "scale")),
                         vector(member(j, where, "offset"), join(where, "offset"))};
  } else if (kind == "discrete") {
    only_keys(j, where, {"kind", "atoms", "probs"});
    spec = DiscreteLaw{rows(member(j, where, "atoms"), join(where, "atoms")),
                       vector(member(j, where, "probs"), join(where, "probs"))};
  } else {
    fail(join(where, "kind"), "unknown distribution kind '" + kind + "'");
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return spec;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::config, "config syntax error at line " + std::to_string(line) + ", column " +
                                       std::to_string(column) + ": " + e.what());
  }
  require_object(j, "<root>");
  only_keys(j, "", {"format_version", "name", "theorem", "grid", "initial_state", "distribution", "n_schedule",
                    "replicas", "probes", "times", "composition", "tolerances", "seed"});

  ExperimentConfig c;
  c.base_dir = base_dir;
  c.format_version = static_cast<int>(unsigned_integer(member(j, "", "format_version"), "format_version"));
  if (c.format_version != kReportFormatVersion)
    fail("format_version", "unsupported version " + std::to_string(c.format_version));
  c.name = string(member(j, "", "name"), "name");
  const std::string tag = string(member(j, "", "theorem"), "theorem");
  const auto theorem = theorem_from_string(tag);
  if (!theorem) fail("theorem", "unknown theorem tag '" + tag + "'");
  c.theorem = *theorem;

  const json& g = member(j, "", "grid");
  only_keys(g, "grid", {"dim", "half_width", "points"});
  const auto dim = unsigned_integer(member(g, "grid", "dim"), "grid.dim");
  const double half_width = number(member(g, "grid", "half_width"), "grid.half_width");
  const auto points = unsigned_integer(member(g, "grid", "points"), "grid.points");
  try {
    c.grid = GridSpec::make(static_cast<int>(dim), half_width, static_cast<std::size_t>(points));
  } catch (const Error& e) {
    fail("grid", e.what());
  }

  c.initial_state = parse_state_spec(member(j, "", "initial_state"), "initial_state");
  if (std::holds_alternative<InitialStateRef>(c.initial_state))
    fail("initial_state", "'initial' cannot be used for the initial state itself");
  c.distribution = member(j, "", "distribution");
  parse_distribution(c.distribution);

  const json& sched = member(j, "", "n_schedule");
  if (!sched.is_array()) fail("n_schedule", "expected an array of positive integers");
  for (std::size_t i = 0; i < sched.size(); ++i) {
    const auto n = unsigned_integer(sched[i], index("n_schedule", i));
    if (n == 0) fail(index("n_schedule", i), "must be positive");
    if (!c.n_schedule.empty() && n <= c.n_schedule.back()) fail("n_schedule", "must be strictly increasing");
    c.n_schedule.push_back(static_cast<std::size_t>(n));
  }
  if (c.n_schedule.empty()) fail("n_schedule", "must not be empty");

  c.replicas = static_cast<std::size_t>(unsigned_integer(member(j, "", "replicas"), "replicas"));
  if (c.replicas == 0) fail("replicas", "must be at least 1");

  c.probes = member(j, "", "probes");
  if (!c.probes.is_array() || c.probes.empty()) fail("probes", "expected a nonempty array");

  if (j.contains("times")) c.times = vector(j["times"], "times");
  if (j.contains("composition")) {
    const std::string comp = string(j["composition"], "composition");
    if (comp == "collapsed") c.composition = CompositionPath::collapsed;
    else if (comp == "sequential") c.composition = CompositionPath::sequential;
    else fail("composition", "expected 'collapsed' or 'sequential'");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    require_object(t, "tolerances");
    only_keys(t, "tolerances", {"level", "decay_factor", "max_final_error", "zero_tolerance"});
    if (t.contains("level")) c.tolerances.level = number(t["level"], "tolerances.level");
    if (t.contains("decay_factor")) c.tolerances.decay_factor = number(t["decay_factor"], "tolerances.decay_factor");
    if (t.contains("max_final_error"))
      c.tolerances.max_final_error = number(t["max_final_error"], "tolerances.max_final_error");
    if (t.contains("zero_tolerance"))
      c.tolerances.zero_tolerance = number(t["zero_tolerance"], "tolerances.zero_tolerance");
  }
  if (j.contains("seed")) c.seed = unsigned_integer(j["seed"], "seed");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["format_version"] = c.format_version;
  j["name"] = c.name;
  j["theorem"] = to_string(c.theorem);
  j["grid"] = {{"dim", c.grid.dim}, {"half_width", c.grid.half_width}, {"points", c.grid.points}};
  j["initial_state"] = state_to_json(c.initial_state);
  j["distribution"] = c.distribution;
  j["n_schedule"] = c.n_schedule;
  j["replicas"] = c.replicas;
  j["probes"] = c.probes;
  j["times"] = c.times;
  j["composition"] = c.composition == CompositionPath::collapsed ? "collapsed" : "sequential";
  j["tolerances"] = {{"level", c.tolerances.level},
                     {"decay_factor", c.tolerances.decay_factor},
                     {"max_final_error", c.tolerances.max_final_error},
                     {"zero_tolerance", c.tolerances.zero_tolerance}};
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

ExperimentSetup resolve(const ExperimentConfig& c) {
  ExperimentSetup s;
  s.name = c.name;
  s.theorem = c.theorem;
  Resolver base{c.grid, c.base_dir, nullptr};
  s.initial = base.normalized_state(state_to_json(c.initial_state), "initial_state");
  s.distribution = parse_distribution(c.distribution);
  s.n_schedule = c.n_schedule;
  s.replicas = c.replicas;
  const Resolver with_initial{c.grid, c.base_dir, &s.initial};
  for (std::size_t i = 0; i < c.probes.size(); ++i) s.probes.push_back(with_initial.probe(c.probes[i], index("probes", i)));
  s.times = c.times;
  s.composition = c.composition;
  s.tolerances = c.tolerances;
  check_setup(s);
  return s;
}

void validate_config(const ExperimentConfig& config) { (void)resolve(config); }

ConvergenceReport run_config(const ExperimentConfig& config, std::uint64_t seed, unsigned workers) {
  ConvergenceReport report = run_experiment(resolve(config), seed, workers);
  report.config = to_json(config);
  return report;
}

}  // namespace qlimit
