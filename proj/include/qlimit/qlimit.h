#ifndef QLIMIT_QLIMIT_H
#define QLIMIT_QLIMIT_H

/* C interface to the qlimit shared library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every fallible call returns ql_status; on
 * failure, ql_last_error() describes the error for the calling thread.
 * Strings returned through char** are heap-allocated and released with
 * ql_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(QLIMIT_BUILDING_LIBRARY)
#define QL_API __attribute__((visibility("default")))
#else
#define QL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ql_status {
  QL_OK = 0,
  QL_ERR_INVALID_ARGUMENT = 1, /* bad argument, grid or domain mismatch, off-grid point */
  QL_ERR_CONFIG = 2,           /* configuration rejected */
  QL_ERR_IO = 3,
  QL_ERR_NUMERIC = 4,          /* state not normalized */
  QL_ERR_INTERNAL = 5
} ql_status;

typedef enum ql_domain { QL_POSITION = 0, QL_FREQUENCY = 1 } ql_domain;

typedef struct ql_grid ql_grid;
typedef struct ql_wave ql_wave;
typedef struct ql_config ql_config;
typedef struct ql_report ql_report;

QL_API const char* ql_last_error(void);
QL_API const char* ql_version(void);
QL_API int ql_format_version(void);
QL_API void ql_string_free(char* s);

/* Grid [-L, L)^dim with `points` (a power of two, >= 4) nodes per axis. */
QL_API ql_status ql_grid_create(int dim, double half_width, size_t points, ql_grid** out);
QL_API void ql_grid_destroy(ql_grid* grid);
QL_API size_t ql_grid_size(const ql_grid* grid);

/* Normalized Gaussian packet; momentum may be NULL. */
QL_API ql_status ql_wave_gaussian(const ql_grid* grid, const double* center, double width,
                                  const double* momentum, ql_wave** out);
/* Copies grid_size(grid) interleaved (re, im) pairs. */
QL_API ql_status ql_wave_from_samples(const ql_grid* grid, const double* re_im, ql_domain domain,
                                      ql_wave** out);
QL_API void ql_wave_destroy(ql_wave* wave);
QL_API ql_status ql_wave_samples(const ql_wave* wave, double* re_im, size_t pairs);
QL_API ql_domain ql_wave_domain(const ql_wave* wave);

QL_API ql_status ql_wave_shift(const ql_wave* u, const double* a, ql_wave** out);
QL_API ql_status ql_wave_impulse(const ql_wave* u, const double* a, ql_wave** out);
QL_API ql_status ql_wave_fourier(const ql_wave* u, ql_wave** out);
QL_API ql_status ql_wave_inverse_fourier(const ql_wave* v, ql_wave** out);
QL_API ql_status ql_wave_norm(const ql_wave* u, double* out);
QL_API ql_status ql_wave_inner(const ql_wave* u, const ql_wave* v, double* re, double* im);

/* rho[u](x, y) = u(x) conj(u(y)) at grid nodes; with QL_FREQUENCY the kernel
 * of F rho F^{-1} is evaluated instead. u must be a normalized position state. */
QL_API ql_status ql_wave_kernel_at(const ql_wave* u, ql_domain domain, const double* x,
                                   const double* y, double* re, double* im);
/* Trace norm of rho[u] - rho[v]. */
QL_API ql_status ql_trace_distance(const ql_wave* u, const ql_wave* v, double* out);

QL_API ql_status ql_config_from_file(const char* path, ql_config** out);
/* base_dir (may be NULL) resolves relative state-file paths. */
QL_API ql_status ql_config_from_string(const char* json, const char* base_dir, ql_config** out);
QL_API ql_status ql_config_validate(const ql_config* cfg);
/* Writes 1 and the seed when the config carries a default seed, else 0. */
QL_API int ql_config_seed(const ql_config* cfg, uint64_t* seed);
QL_API void ql_config_destroy(ql_config* cfg);

/* workers == 0 selects ql_default_workers(). */
QL_API ql_status ql_run(const ql_config* cfg, uint64_t seed, unsigned workers, ql_report** out);
QL_API int ql_report_passed(const ql_report* r);
QL_API size_t ql_report_probe_count(const ql_report* r);
/* 0 pass, 1 fail, 2 vacuous */
QL_API int ql_report_probe_verdict(const ql_report* r, size_t index);
QL_API ql_status ql_report_json(const ql_report* r, char** out);
QL_API ql_status ql_report_from_json(const char* json, ql_report** out);
QL_API ql_status ql_report_write(const ql_report* r, const char* dir);
QL_API void ql_report_destroy(ql_report* r);

QL_API size_t ql_preset_count(void);
QL_API const char* ql_preset_name(size_t index);
QL_API const char* ql_preset_description(size_t index);
QL_API const char* ql_preset_json(size_t index);

/* QLIMIT_WORKERS if set to a positive integer, else the logical core count. */
QL_API unsigned ql_default_workers(void);

#ifdef __cplusplus
}
#endif

#endif
