#include "qlimit/qlimit.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "qlimit/channels.hpp"
#include "qlimit/config.hpp"
#include "qlimit/density.hpp"
#include "qlimit/error.hpp"
#include "qlimit/presets.hpp"
#include "qlimit/report.hpp"

struct ql_grid {
  qlimit::GridSpec spec;
};
struct ql_wave {
  qlimit::WaveFunction wave;
};
struct ql_config {
  qlimit::ExperimentConfig config;
};
struct ql_report {
  qlimit::ConvergenceReport report;
};

namespace {

thread_local std::string last_error;

ql_status status_of(qlimit::ErrorCode c) {
  using qlimit::ErrorCode;
  switch (c) {
    case ErrorCode::invalid_argument:
    case ErrorCode::grid_mismatch:
    case ErrorCode::domain_mismatch:
    case ErrorCode::off_grid:
      return QL_ERR_INVALID_ARGUMENT;
    case ErrorCode::not_normalized:
      return QL_ERR_NUMERIC;
    case ErrorCode::config:
      return QL_ERR_CONFIG;
    case ErrorCode::io:
      return QL_ERR_IO;
    case ErrorCode::internal:
      break;
  }
  return QL_ERR_INTERNAL;
}

ql_status fail(ql_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
ql_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return QL_OK;
  } catch (const qlimit::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QL_ERR_INTERNAL, "unknown error");
  }
}

#define QL_REQUIRE(cond)                                              \
  do {                                                                \
    if (!(cond)) return fail(QL_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

std::span<const double> point(const qlimit::GridSpec& g, const double* p) {
  return {p, static_cast<std::size_t>(g.dim)};
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qlimit::Domain to_domain(ql_domain d) {
  return d == QL_FREQUENCY ? qlimit::Domain::frequency : qlimit::Domain::position;
}

}  // namespace

extern "C" {

const char* ql_last_error(void) { return last_error.c_str(); }
const char* ql_version(void) { return qlimit::library_version(); }
int ql_format_version(void) { return qlimit::kReportFormatVersion; }
void ql_string_free(char* s) { std::free(s); }

ql_status ql_grid_create(int dim, double half_width, size_t points, ql_grid** out) {
  QL_REQUIRE(out);
  return guarded([&] { *out = new ql_grid{qlimit::GridSpec::make(dim, half_width, points)}; });
}
void ql_grid_destroy(ql_grid* grid) { delete grid; }
size_t ql_grid_size(const ql_grid* grid) { return grid ? grid->spec.size() : 0; }

ql_status ql_wave_gaussian(const ql_grid* grid, const double* center, double width,
                           const double* momentum, ql_wave** out) {
  QL_REQUIRE(grid && center && out);
  return guarded([&] {
    auto p = momentum ? point(grid->spec, momentum) : std::span<const double>{};
    *out = new ql_wave{qlimit::gaussian_packet(grid->spec, point(grid->spec, center), width, p)};
  });
}

ql_status ql_wave_from_samples(const ql_grid* grid, const double* re_im, ql_domain domain,
                               ql_wave** out) {
  QL_REQUIRE(grid && re_im && out);
  return guarded([&] {
    std::vector<qlimit::cplx> s(grid->spec.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {re_im[2 * i], re_im[2 * i + 1]};
    *out = new ql_wave{qlimit::WaveFunction(grid->spec, std::move(s), to_domain(domain))};
  });
}
void ql_wave_destroy(ql_wave* wave) { delete wave; }

ql_status ql_wave_samples(const ql_wave* wave, double* re_im, size_t pairs) {
  QL_REQUIRE(wave && re_im);
  if (pairs < wave->wave.size())
    return fail(QL_ERR_INVALID_ARGUMENT, "output buffer holds fewer pairs than the grid size");
  for (std::size_t i = 0; i < wave->wave.size(); ++i) {
    re_im[2 * i] = wave->wave[i].real();
    re_im[2 * i + 1] = wave->wave[i].imag();
  }
  return QL_OK;
}
ql_domain ql_wave_domain(const ql_wave* wave) {
  return wave && wave->wave.domain() == qlimit::Domain::frequency ? QL_FREQUENCY : QL_POSITION;
}

ql_status ql_wave_shift(const ql_wave* u, const double* a, ql_wave** out) {
  QL_REQUIRE(u && a && out);
  return guarded([&] { *out = new ql_wave{qlimit::shift(u->wave, point(u->wave.grid(), a))}; });
}
ql_status ql_wave_impulse(const ql_wave* u, const double* a, ql_wave** out) {
  QL_REQUIRE(u && a && out);
  return guarded([&] { *out = new ql_wave{qlimit::impulse(u->wave, point(u->wave.grid(), a))}; });
}
ql_status ql_wave_fourier(const ql_wave* u, ql_wave** out) {
  QL_REQUIRE(u && out);
  return guarded([&] { *out = new ql_wave{qlimit::fourier(u->wave)}; });
}
ql_status ql_wave_inverse_fourier(const ql_wave* v, ql_wave** out) {
  QL_REQUIRE(v && out);
  return guarded([&] { *out = new ql_wave{qlimit::inverse_fourier(v->wave)}; });
}
ql_status ql_wave_norm(const ql_wave* u, double* out) {
  QL_REQUIRE(u && out);
  return guarded([&] { *out = qlimit::norm(u->wave); });
}
ql_status ql_wave_inner(const ql_wave* u, const ql_wave* v, double* re, double* im) {
  QL_REQUIRE(u && v && re && im);
  return guarded([&] {
    auto z = qlimit::inner(u->wave, v->wave);
    *re = z.real();
    *im = z.imag();
  });
}

ql_status ql_wave_kernel_at(const ql_wave* u, ql_domain domain, const double* x, const double* y,
                            double* re, double* im) {
  QL_REQUIRE(u && x && y && re && im);
  return guarded([&] {
    const auto& g = u->wave.grid();
    qlimit::PureDensity rho(u->wave);
    qlimit::KernelPoint p{to_domain(domain), {x, x + g.dim}, {y, y + g.dim}};
    auto z = domain == QL_FREQUENCY ? qlimit::fourier_kernel_at(rho, p) : qlimit::kernel_at(rho, p);
    *re = z.real();
    *im = z.imag();
  });
}

ql_status ql_trace_distance(const ql_wave* u, const ql_wave* v, double* out) {
  QL_REQUIRE(u && v && out);
  return guarded([&] { *out = qlimit::trace_distance_pure(u->wave, v->wave); });
}

ql_status ql_config_from_file(const char* path, ql_config** out) {
  QL_REQUIRE(path && out);
  return guarded([&] { *out = new ql_config{qlimit::load_config(path)}; });
}
ql_status ql_config_from_string(const char* json, const char* base_dir, ql_config** out) {
  QL_REQUIRE(json && out);
  return guarded([&] {
    *out = new ql_config{qlimit::parse_config(json, base_dir ? base_dir : "")};
  });
}
ql_status ql_config_validate(const ql_config* cfg) {
  QL_REQUIRE(cfg);
  return guarded([&] { qlimit::validate_config(cfg->config); });
}
int ql_config_seed(const ql_config* cfg, uint64_t* seed) {
  if (!cfg || !cfg->config.seed) return 0;
  if (seed) *seed = *cfg->config.seed;
  return 1;
}
void ql_config_destroy(ql_config* cfg) { delete cfg; }

ql_status ql_run(const ql_config* cfg, uint64_t seed, unsigned workers, ql_report** out) {
  QL_REQUIRE(cfg && out);
  return guarded([&] {
    unsigned w = workers ? workers : qlimit::default_workers();
    *out = new ql_report{qlimit::run_config(cfg->config, seed, w)};
  });
}
int ql_report_passed(const ql_report* r) { return r && r->report.passed ? 1 : 0; }
size_t ql_report_probe_count(const ql_report* r) { return r ? r->report.probes.size() : 0; }
int ql_report_probe_verdict(const ql_report* r, size_t index) {
  if (!r || index >= r->report.probes.size()) return -1;
  return static_cast<int>(r->report.probes[index].verdict);
}
ql_status ql_report_json(const ql_report* r, char** out) {
  QL_REQUIRE(r && out);
  return guarded([&] { *out = dup_string(qlimit::dump_report(r->report)); });
}
ql_status ql_report_from_json(const char* json, ql_report** out) {
  QL_REQUIRE(json && out);
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw qlimit::Error(qlimit::ErrorCode::invalid_argument, e.what());
    }
    *out = new ql_report{qlimit::report_from_json(j)};
  });
}
ql_status ql_report_write(const ql_report* r, const char* dir) {
  QL_REQUIRE(r && dir);
  return guarded([&] { qlimit::write_report(r->report, dir); });
}
void ql_report_destroy(ql_report* r) { delete r; }

size_t ql_preset_count(void) { return qlimit::presets().size(); }
const char* ql_preset_name(size_t index) {
  return index < qlimit::presets().size() ? qlimit::presets()[index].name.c_str() : nullptr;
}
const char* ql_preset_description(size_t index) {
  return index < qlimit::presets().size() ? qlimit::presets()[index].description.c_str() : nullptr;
}
const char* ql_preset_json(size_t index) {
  return index < qlimit::presets().size() ? qlimit::presets()[index].json.c_str() : nullptr;
}

unsigned ql_default_workers(void) { return qlimit::default_workers(); }

}  // extern "C"
