// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "oracles.hpp"
#include "qlimit/channels.hpp"
#include "qlimit/config.hpp"
#include "qlimit/density.hpp"
#include "qlimit/experiments.hpp"
#include "qlimit/presets.hpp"

using namespace qlimit;
using nlohmann::json;
using oracle::pi;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& what, const std::string& detail, double seconds) {
  std::printf("%s criterion %2d: %s [%s] (%.1f s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

void criterion(int id, const std::string& what, const std::function<bool(std::string&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  verdict(id, ok, what, detail,
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

json preset(const std::string& tag) {
  for (const auto& p : presets())
    if (json::parse(p.json)["theorem"] == tag) return json::parse(p.json);
  throw std::runtime_error("no preset for " + tag);
}

ConvergenceReport run(const json& cfg, std::uint64_t seed, unsigned workers = 0) {
  return run_config(parse_config(cfg.dump()), seed, workers ? workers : default_workers());
}

const ProbeReport& probe(const ConvergenceReport& r, const std::string& label) {
  for (const auto& p : r.probes)
    if (p.label == label) return p;
  throw std::runtime_error("no probe " + label);
}

GridSpec default_grid() { return GridSpec::make(1, 16.0, 1024); }

// Every number of two reports, except the config echo and naming fields.
double report_gap(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return std::abs(a.get<double>() - b.get<double>());
  if (a.is_object() && b.is_object()) {
    double m = 0;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (it.key() == "config" || it.key() == "name" || it.key() == "theorem" || it.key() == "channel" ||
          it.key() == "label" || it.key() == "kind" || it.key() == "warnings")
        continue;
      if (!b.contains(it.key())) return INFINITY;
      m = std::max(m, report_gap(*it, b.at(it.key())));
    }
    return m;
  }
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) return INFINITY;
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, report_gap(a[i], b[i]));
    return m;
  }
  return a == b ? 0.0 : INFINITY;
}

}  // namespace

int main() {
  std::printf("workers: %u\n", default_workers());

  criterion(1, "Fourier image of a shifted pure state picks up exp(i a (alpha - beta))", [](std::string& d) {
    const auto g = default_grid();
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> law(-4.0, 4.0);
    const std::vector<double> c{0.0}, p{0.5};
    const std::vector<WaveFunction> states{gaussian_packet(g, c, 1.0, p), oracle::random_packet_state(g, gen)};
    const auto al = frequency_axis(g, 0);
    double worst = 0;
    for (const auto& u : states) {
      const auto fu = fourier(u);
      for (int rep = 0; rep < 20; ++rep) {
        const std::vector<double> a{law(gen)};
        const PureDensity moved(shift(u, a));
        for (std::size_t i = 0; i < 16; ++i)
          for (std::size_t j = 0; j < 16; ++j) {
            const std::size_t ia = 3 + 64 * i, ib = 35 + 64 * j;
            const cplx lhs = fourier_kernel_at(moved, {Domain::frequency, {al[ia]}, {al[ib]}});
            const cplx rhs = std::polar(1.0, a[0] * (al[ia] - al[ib])) * fu[ia] * std::conj(fu[ib]);
            worst = std::max(worst, std::abs(lhs - rhs));
          }
      }
    }
    d = "max residual " + fmt("%.3g", worst) + " < 1e-9";
    return worst < 1e-9;
  });

  criterion(2, "100 sequential shifts equal one shift by the sum; unitary per step", [](std::string& d) {
    const auto g = default_grid();
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> law(-0.5, 0.5);
    const auto u = oracle::random_packet_state(g, gen);
    std::vector<std::vector<double>> steps;
    std::vector<double> total{0.0};
    for (int i = 0; i < 100; ++i) {
      steps.push_back({law(gen)});
      total[0] += steps.back()[0];
    }
    WaveFunction cur = u;
    double drift = 0;
    for (const auto& s : steps) {
      const double before = norm(cur);
      cur = shift(cur, s);
      drift = std::max(drift, std::abs(norm(cur) - before));
    }
    const double seq = oracle::sup_diff(cur.samples(), shift(u, total).samples());
    const double via_compose =
        oracle::sup_diff(compose_shifts(u, steps, CompositionPath::sequential).samples(), cur.samples());
    d = "sup difference " + fmt("%.3g", seq) + " < 1e-9, per-step norm drift " + fmt("%.3g", drift) + " < 1e-12";
    return seq < 1e-9 && drift < 1e-12 && via_compose == 0.0;
  });

  criterion(3, "trace distance of pure states bounded by 2 ||u - v||", [](std::string& d) {
    const auto g = default_grid();
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> mix(0.0, 1.0);
    int violations = 0;
    double worst_ratio = 0;
    for (int rep = 0; rep < 10000; ++rep) {
      const auto u = normalize(WaveFunction(g, oracle::random_samples(g.size(), gen)));
      auto v = normalize(WaveFunction(g, oracle::random_samples(g.size(), gen)));
      // mix toward u so small distances are covered too
      const double t = std::pow(mix(gen), 4);
      std::vector<cplx> w(g.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] + t * (v[i] - u[i]);
      v = normalize(WaveFunction(g, w));
      const double td = trace_distance_pure(u, v), bound = 2 * distance(u, v);
      if (td > bound + 1e-12) ++violations;
      if (bound > 0) worst_ratio = std::max(worst_ratio, td / bound);
    }
    d = std::to_string(violations) + " violations in 10^4 pairs, max ratio " + fmt("%.6f", worst_ratio);
    return violations == 0;
  });

  criterion(4, "strong law: kernel(0,0) and indicator of [0,inf), Rademacher + 0.3", [](std::string& d) {
    auto k = run(preset("slln_kernel"), 4);
    auto w = run(preset("slln_wot"), 4);
    bool ok = true;
    for (const auto* p : {&probe(k, "kernel(0,0)"), &probe(w, "indicator[0,inf)")}) {
      const double first = *p->rows.front().median_error, last = *p->rows.back().median_error;
      const bool good = p->rows.front().at == 100 && p->rows.back().at == 10000 && last * 5 <= first && last < 0.02;
      ok = ok && good;
      d += p->label + ": median " + fmt("%.4g", first) + " -> " + fmt("%.4g", last) + "; ";
    }
    // the kernel limit is |u(0.3)|^2 for the unit packet
    const double limit_gap = std::abs(*probe(k, "kernel(0,0)").limit - std::pow(oracle::gauss(0.3), 2));
    d += "limit error " + fmt("%.2g", limit_gap);
    return ok && k.replicas == 50 && w.replicas == 50 && limit_gap < 1e-12;
  });

  criterion(5, "CLT mean of the Fourier kernel at (1,-1) is exp(-2) rho[Fu](1,-1)", [](std::string& d) {
    auto cfg = preset("clt_kernel");
    auto r = run(cfg, 5);
    const auto& row = probe(r, "fourier_kernel(1,-1)").rows.at(0);
    // Fu(alpha) = pi^{-1/4} exp(-alpha^2/2) for the unit packet
    const double target = std::exp(-2.0) * oracle::gauss(1.0) * oracle::gauss(-1.0);
    const bool ok = r.replicas == 20000 && row.at == 400 && row.value_re->covers(target) && row.value_im->covers(0.0);
    d = "target " + fmt("%.6f", target) + ", re CI [" + fmt("%.6f", row.value_re->ci_lo) + ", " +
        fmt("%.6f", row.value_re->ci_hi) + "], im CI [" + fmt("%.6f", row.value_im->ci_lo) + ", " +
        fmt("%.6f", row.value_im->ci_hi) + "]";
    return ok;
  });

  criterion(6, "KS: n = 400 compositions vs S_eta references pass in >= 48 of 50 repetitions", [](std::string& d) {
    auto kcfg = preset("clt_kernel");
    kcfg["replicas"] = 5000;
    kcfg["probes"] = json::array({kcfg["probes"][0]});
    auto wcfg = preset("clt_wot");
    wcfg["replicas"] = 5000;
    wcfg["probes"] = json::array({wcfg["probes"][0]});
    int kre = 0, kim = 0, tre = 0;
    for (std::uint64_t s = 1; s <= 50; ++s) {
      const auto kr = run(kcfg, 6000 + s);
      const auto& krow = kr.probes[0].rows[0];
      kre += krow.ks_re->passed;
      kim += krow.ks_im->passed;
      const auto wr = run(wcfg, 6000 + s);
      tre += wr.probes[0].rows[0].ks_re->passed;
    }
    d = "kernel re " + std::to_string(kre) + "/50, kernel im " + std::to_string(kim) + "/50, projector tr " +
        std::to_string(tre) + "/50";
    return kre >= 48 && kim >= 48 && tre >= 48;
  });

  criterion(7, "Welch comparison of tr-value means not rejected at 1%", [](std::string& d) {
    auto cfg = preset("clt_wot");
    auto r = run(cfg, 7);
    bool ok = r.replicas == 5000;
    for (const auto& p : r.probes) {
      const auto& m = *p.rows.at(0).mean_re;
      ok = ok && m.method == "welch" && m.p_value >= 0.01;
      d += p.label + ": p = " + fmt("%.3f", m.p_value) + "; ";
    }
    return ok;
  });

  criterion(8, "random walk marginals at t = 0.25, 0.5, 1 and the t = 1 cross-check", [](std::string& d) {
    auto r = run(preset("random_walk"), 8);
    const auto& p = r.probes.at(0);
    bool ok = r.replicas == 2000;
    for (const auto& row : p.rows) {
      if (row.at == 0.0) continue;
      ok = ok && row.ks_re->passed && row.ks_im->passed;
      d += "t=" + fmt("%g", row.at) + " p=" + fmt("%.3f", row.ks_re->p_value) + "; ";
      if (row.at == 1.0) {
        ok = ok && row.cross_check_re && row.cross_check_re->passed && row.cross_check_im->passed;
        d += "cross-check p=" + fmt("%.3f", row.cross_check_re->p_value);
      }
    }
    return ok && p.rows.size() == 4;
  });

  criterion(9, "L1: E|delta| at n = 10^4 below 1/5 of n = 10^2; |delta| <= 2 ||A||", [](std::string& d) {
    auto r = run(preset("l1_wot"), 9);
    const auto& p = r.probes.at(0);
    const double first = p.rows.front().mean_error->mean, last = p.rows.back().mean_error->mean;
    double worst = 0;
    for (const auto& row : p.rows) worst = std::max(worst, *row.max_error);
    d = "E|delta| " + fmt("%.4g", first) + " -> " + fmt("%.4g", last) + ", max |delta| " + fmt("%.4g", worst) +
        " vs 2||A|| = " + fmt("%.1f", 2 * *p.operator_norm_bound);
    return r.replicas == 2000 && p.rows.front().at == 100 && p.rows.back().at == 10000 && last * 5 < first &&
           worst <= 2 * *p.operator_norm_bound;
  });

  criterion(10, "impulse channel: conjugation, Fourier duality, vacuous probes flagged", [](std::string& d) {
    const auto g = default_grid();
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> law(-3.0, 3.0);
    double worst = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto u = rep % 2 ? oracle::random_packet_state(g, gen)
                             : normalize(WaveFunction(g, oracle::random_samples(g.size(), gen)));
      const std::vector<double> a{law(gen)};
      worst = std::max(worst, conjugation_residual(u, a));
    }
    d = "max residual " + fmt("%.3g", worst) + "; ";

    // R_a u = F S_a w with w = F^{-1} u on the dual grid, so the impulse run
    // on u and the shift run on w see identical kernel values.
    const ExperimentSetup impulse_setup = resolve(parse_config(preset("impulse_slln").dump()));
    const auto& u = impulse_setup.initial;
    ExperimentSetup shift_setup = impulse_setup;
    shift_setup.theorem = Theorem::slln_kernel;
    shift_setup.initial = inverse_fourier(u.retagged(g.dual(), Domain::frequency));
    shift_setup.probes.clear();
    ExperimentSetup impulse_pair = impulse_setup;
    impulse_pair.probes.clear();
    for (const auto& p : impulse_setup.probes) {
      if (const auto* k = std::get_if<KernelPoint>(&p.target)) {
        impulse_pair.probes.push_back(p);
        shift_setup.probes.push_back({p.label, KernelPoint{Domain::frequency, k->x, k->y}});
      } else if (p.label == "projector(u)") {
        impulse_pair.probes.push_back(p);
        shift_setup.probes.push_back({p.label, BoundedOperator::projector(shift_setup.initial)});
      }
    }
    const auto ri = run_experiment(impulse_pair, 10, default_workers());
    const auto rs = run_experiment(shift_setup, 10, default_workers());
    const double gap = report_gap(to_json(ri), to_json(rs));
    d += "duality gap " + fmt("%.3g", gap) + " over " + std::to_string(ri.probes.size()) + " probes; ";

    const auto full = run(preset("impulse_slln"), 10);
    const auto& ind = probe(full, "indicator[0,inf)");
    const auto ic = run(preset("impulse_clt"), 10);
    auto mult = preset("impulse_clt");
    mult["probes"] = {{{"label", "indicator"},
                       {"kind", "operator"},
                       {"operator", {{"kind", "halfspace_indicator"}, {"axis", 0}, {"threshold", 0.0}}}},
                      {{"label", "diag"}, {"kind", "kernel"}, {"domain", "position"}, {"x", {0.5}}, {"y", {0.5}}}};
    const auto mr = run(mult, 10);
    const bool flagged = ind.verdict == Verdict::vacuous && mr.probes[0].verdict == Verdict::vacuous &&
                         mr.probes[1].verdict == Verdict::vacuous;
    d += std::string("multiplication probes ") + (flagged ? "flagged vacuous" : "NOT flagged");
    bool others = full.passed && ic.passed;
    for (const auto& p : full.probes)
      if (p.label != "indicator[0,inf)") others = others && p.verdict == Verdict::pass;
    return worst < 1e-10 && gap < 1e-10 && ri.passed && rs.passed && flagged && others;
  });

  criterion(11, "1 vs 8 workers give byte-identical report.json for every preset", [](std::string& d) {
    int same = 0;
    for (const auto& p : presets()) {
      const auto cfg = json::parse(p.json);
      if (dump_report(run(cfg, 11, 1)) == dump_report(run(cfg, 11, 8))) ++same;
      else d += p.name + " differs; ";
    }
    d += std::to_string(same) + "/" + std::to_string(presets().size()) + " identical";
    return same == static_cast<int>(presets().size());
  });

  std::printf("%s: %d criterion failure(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
