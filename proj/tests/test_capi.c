/* Exercises libqlimit through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qlimit/qlimit.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static const char* config_text =
    "{\"format_version\": 1, \"name\": \"capi\", \"theorem\": \"slln_wot\","
    " \"grid\": {\"dim\": 1, \"half_width\": 16.0, \"points\": 1024},"
    " \"initial_state\": {\"kind\": \"gaussian\", \"center\": [0.0], \"width\": 1.0},"
    " \"distribution\": {\"kind\": \"rademacher\", \"scale\": [1.0], \"offset\": [0.3]},"
    " \"n_schedule\": [100, 1000, 10000], \"replicas\": 20,"
    " \"probes\": [{\"label\": \"projector\", \"kind\": \"operator\","
    "              \"operator\": {\"kind\": \"projector\", \"state\": {\"kind\": \"initial\"}}}],"
    " \"seed\": 42}";

int main(void) {
  const double pi = 3.14159265358979323846;
  ql_grid* grid = NULL;
  ql_wave *u = NULL, *s = NULL, *f = NULL, *back = NULL;
  double center = 0.0, a = 1.0, x = 0.0, y = 0.0, re = 0, im = 0, n = 0, d = 0;

  EXPECT(strcmp(ql_version(), "1.0.0") == 0);
  EXPECT(ql_format_version() == 1);

  EXPECT(ql_grid_create(1, 16.0, 6, &grid) == QL_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(ql_last_error()) > 0);
  EXPECT(ql_grid_create(1, 16.0, 1024, &grid) == QL_OK);
  EXPECT(ql_grid_size(grid) == 1024);

  EXPECT(ql_wave_gaussian(grid, &center, 1.0, NULL, &u) == QL_OK);
  EXPECT(ql_wave_norm(u, &n) == QL_OK && fabs(n - 1.0) < 1e-12);
  EXPECT(ql_wave_kernel_at(u, QL_POSITION, &x, &y, &re, &im) == QL_OK);
  EXPECT(fabs(re - 1.0 / sqrt(pi)) < 1e-12 && im == 0.0);

  EXPECT(ql_wave_shift(u, &a, &s) == QL_OK);
  EXPECT(ql_wave_kernel_at(s, QL_POSITION, &x, &y, &re, &im) == QL_OK);
  EXPECT(fabs(re - exp(-1.0) / sqrt(pi)) < 1e-9);
  x = 0.013;
  EXPECT(ql_wave_kernel_at(s, QL_POSITION, &x, &y, &re, &im) == QL_ERR_INVALID_ARGUMENT);

  EXPECT(ql_trace_distance(u, s, &d) == QL_OK);
  EXPECT(fabs(d - 2.0 * sqrt(1.0 - exp(-0.5))) < 1e-9); /* |<u, S_1 u>|^2 = e^{-1/2} */

  EXPECT(ql_wave_fourier(u, &f) == QL_OK);
  EXPECT(ql_wave_domain(f) == QL_FREQUENCY);
  EXPECT(ql_wave_inverse_fourier(f, &back) == QL_OK);
  {
    double* a1 = malloc(2 * 1024 * sizeof(double));
    double* a2 = malloc(2 * 1024 * sizeof(double));
    double worst = 0;
    size_t i;
    EXPECT(ql_wave_samples(u, a1, 1024) == QL_OK);
    EXPECT(ql_wave_samples(back, a2, 1024) == QL_OK);
    EXPECT(ql_wave_samples(back, a2, 10) == QL_ERR_INVALID_ARGUMENT);
    for (i = 0; i < 2048; ++i) worst = fmax(worst, fabs(a1[i] - a2[i]));
    EXPECT(worst < 1e-12);
    free(a1);
    free(a2);
  }
  EXPECT(ql_wave_inverse_fourier(u, &back) == QL_ERR_INVALID_ARGUMENT);
  EXPECT(ql_wave_norm(NULL, &n) == QL_ERR_INVALID_ARGUMENT);

  {
    ql_config* cfg = NULL;
    ql_report *r1 = NULL, *r8 = NULL, *parsed = NULL;
    char *j1 = NULL, *j8 = NULL, *jp = NULL;
    uint64_t seed = 0;
    EXPECT(ql_config_from_string("{\"name\": ", NULL, &cfg) == QL_ERR_CONFIG);
    EXPECT(strstr(ql_last_error(), "line") != NULL);
    EXPECT(ql_config_from_string(config_text, NULL, &cfg) == QL_OK);
    EXPECT(ql_config_validate(cfg) == QL_OK);
    EXPECT(ql_config_seed(cfg, &seed) == 1 && seed == 42);
    EXPECT(ql_run(cfg, seed, 1, &r1) == QL_OK);
    EXPECT(ql_run(cfg, seed, 8, &r8) == QL_OK);
    EXPECT(ql_report_passed(r1) == 1);
    EXPECT(ql_report_probe_count(r1) == 1);
    EXPECT(ql_report_probe_verdict(r1, 0) == 0);
    EXPECT(ql_report_probe_verdict(r1, 5) == -1);
    EXPECT(ql_report_json(r1, &j1) == QL_OK);
    EXPECT(ql_report_json(r8, &j8) == QL_OK);
    EXPECT(strcmp(j1, j8) == 0);
    EXPECT(ql_report_from_json(j1, &parsed) == QL_OK);
    EXPECT(ql_report_json(parsed, &jp) == QL_OK);
    EXPECT(strcmp(j1, jp) == 0);
    EXPECT(ql_report_from_json("[", &parsed) != QL_OK);
    ql_string_free(j1);
    ql_string_free(j8);
    ql_string_free(jp);
    ql_report_destroy(r1);
    ql_report_destroy(r8);
    ql_report_destroy(parsed);
    ql_config_destroy(cfg);
  }

  EXPECT(ql_preset_count() == 10);
  EXPECT(ql_preset_name(10) == NULL);
  {
    size_t i;
    for (i = 0; i < ql_preset_count(); ++i) {
      ql_config* cfg = NULL;
      EXPECT(ql_config_from_string(ql_preset_json(i), NULL, &cfg) == QL_OK);
      EXPECT(ql_config_validate(cfg) == QL_OK);
      ql_config_destroy(cfg);
    }
  }
  EXPECT(ql_default_workers() >= 1);

  ql_wave_destroy(u);
  ql_wave_destroy(s);
  ql_wave_destroy(f);
  ql_wave_destroy(back);
  ql_grid_destroy(grid);
  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("all C API checks passed\n");
  return failures ? 1 : 0;
}
