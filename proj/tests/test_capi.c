#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "seglab/seglab.h"

static int failures = 0;

#define EXPECT(cond)                                                    \
  do {                                                                  \
    if (!(cond)) {                                                      \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                       \
    }                                                                   \
  } while (0)

static int log_lines = 0;

static void on_log(const char* line, void* user) {
  (void)user;
  if (strncmp(line, "stage ", 6) == 0) ++log_lines;
}

static int file_exists(const char* path) {
  FILE* f = fopen(path, "rb");
  if (!f) return 0;
  fclose(f);
  return 1;
}

static seglab_config* small_config(void) {
  seglab_config* cfg = NULL;
  EXPECT(seglab_config_parse("[domain]\nn = 33\n[solver]\nbeta_schedule = 1,100\n[diagnostics]\nnu = 2\n", &cfg) ==
         SEGLAB_OK);
  return cfg;
}

int main(int argc, char** argv) {
  const char* root = argc > 1 ? argv[1] : "capi_out";
  char out[512], path[1400];
  snprintf(out, sizeof out, "%s/sweep", root);

  EXPECT(strlen(seglab_version()) > 0);
  EXPECT(strstr(seglab_config_help(), "beta_schedule") != NULL);
  EXPECT(seglab_exit_code(SEGLAB_ERR_IO) == 1);
  EXPECT(seglab_exit_code(SEGLAB_ERR_UNCONVERGED) == 2);
  EXPECT(seglab_exit_code(SEGLAB_ERR_INVARIANT) == 3);

  /* configuration handles */
  seglab_config* def = NULL;
  EXPECT(seglab_config_default(&def) == SEGLAB_OK);
  EXPECT(seglab_config_set(def, "solver", "sweep_tol", "-1") == SEGLAB_ERR_CONFIG);
  EXPECT(strstr(seglab_last_error(), "sweep_tol") != NULL);
  EXPECT(seglab_config_set(def, "domain", "n", "65") == SEGLAB_OK);
  EXPECT(strcmp(seglab_last_error(), "") == 0);
  char* text = NULL;
  EXPECT(seglab_config_render(def, &text) == SEGLAB_OK);
  EXPECT(text && strstr(text, "n = 65") != NULL);
  seglab_string_free(text);
  seglab_config* bad = NULL;
  EXPECT(seglab_config_load("/nonexistent/seglab.ini", &bad) != SEGLAB_OK);
  EXPECT(bad == NULL);
  EXPECT(seglab_config_parse("[domain]\nn = 65\nn = 33\n", &bad) == SEGLAB_ERR_CONFIG);
  EXPECT(seglab_config_default(NULL) == SEGLAB_ERR_INVALID_ARGUMENT);
  int workers = 0;
  EXPECT(seglab_resolve_workers(def, 4, &workers) == SEGLAB_OK && workers == 4);
  seglab_config_free(def);

  /* full sweep through the API, with a log callback */
  seglab_config* cfg = small_config();
  seglab_set_log(on_log, NULL);
  EXPECT(seglab_run_sweep(cfg, out, 1) == SEGLAB_OK);
  seglab_set_log(NULL, NULL);
  EXPECT(log_lines == 2);
  snprintf(path, sizeof path, "%s/summary.json", out);
  EXPECT(file_exists(path));
  snprintf(path, sizeof path, "%s/checkpoints/stage_01.seg", out);
  EXPECT(file_exists(path));

  /* state access */
  seglab_state* st = NULL;
  EXPECT(seglab_state_load(cfg, path, &st) == SEGLAB_OK);
  int nx = 0, ny = 0;
  double beta = 0.0, e[5];
  EXPECT(seglab_state_info(st, &nx, &ny, &beta) == SEGLAB_OK);
  EXPECT(nx == 33 && ny == 33 && beta == 100.0);
  EXPECT(seglab_state_energy(st, e) == SEGLAB_OK);
  EXPECT(fabs(e[0] + e[1] + e[2] + e[3] - e[4]) < 1e-12 * e[4]);
  EXPECT(e[3] > 0.0);
  double* vals = malloc(sizeof(double) * (size_t)(nx * ny));
  EXPECT(seglab_state_values(st, 0, vals, (size_t)(nx * ny)) == SEGLAB_OK);
  double vmin = 1e300;
  for (int k = 0; k < nx * ny; ++k) vmin = vals[k] < vmin ? vals[k] : vmin;
  EXPECT(vmin >= 0.0);
  EXPECT(seglab_state_values(st, 3, vals, (size_t)(nx * ny)) == SEGLAB_ERR_INVALID_ARGUMENT);
  EXPECT(seglab_state_values(st, 0, vals, 5) == SEGLAB_ERR_INVALID_ARGUMENT);
  free(vals);
  seglab_state_free(st);

  /* diagnostics, report, solve */
  char dout[1024];
  snprintf(dout, sizeof dout, "%s/diag", root);
  EXPECT(seglab_run_diag(cfg, "overlap", path, dout, 2) == SEGLAB_OK);
  EXPECT(seglab_run_diag(cfg, "bogus", path, dout, 1) == SEGLAB_ERR_CONFIG);
  EXPECT(seglab_run_diag(cfg, "acf", NULL, dout, 1) == SEGLAB_ERR_CONFIG);
  EXPECT(seglab_run_report(cfg, out, 1) == SEGLAB_OK);
  snprintf(dout, sizeof dout, "%s/solve", root);
  EXPECT(seglab_run_solve(cfg, dout, 1, path) == SEGLAB_OK);
  snprintf(path, sizeof path, "%s/state.seg", dout);
  EXPECT(file_exists(path));

  /* starved budget: exit 2 */
  seglab_config* starved = NULL;
  EXPECT(seglab_config_parse("[domain]\nn = 33\n[solver]\nbeta_schedule = 1e6\nmax_sweeps = 1\n[diagnostics]\nnu = 2\n",
                             &starved) == SEGLAB_OK);
  snprintf(dout, sizeof dout, "%s/starved", root);
  EXPECT(seglab_run_sweep(starved, dout, 1) == SEGLAB_ERR_UNCONVERGED);
  EXPECT(strstr(seglab_last_error(), "did not converge") != NULL);
  seglab_config_free(starved);

  /* unreadable state: io error, exit 1 */
  st = NULL;
  EXPECT(seglab_state_load(cfg, "/nonexistent/state.seg", &st) == SEGLAB_ERR_IO);

  /* sphere */
  char* json = NULL;
  snprintf(dout, sizeof dout, "%s/sphere", root);
  EXPECT(seglab_sphere(2, 1, 72, 1, dout, &json) == SEGLAB_OK);
  EXPECT(json && strstr(json, "\"best_value\"") != NULL);
  seglab_string_free(json);
  EXPECT(seglab_sphere(1, 1, 72, 1, dout, NULL) == SEGLAB_ERR_CONFIG);

  seglab_config_free(cfg);
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
