#ifndef SEGLAB_SEGLAB_H
#define SEGLAB_SEGLAB_H

#include <stddef.h>

#if defined(_WIN32)
#define SEGLAB_API __declspec(dllexport)
#else
#define SEGLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. 0..3 coincide with the process exit codes. */
typedef enum seglab_status {
  SEGLAB_OK = 0,
  SEGLAB_ERR_CONFIG = 1,
  SEGLAB_ERR_UNCONVERGED = 2,
  SEGLAB_ERR_INVARIANT = 3,
  SEGLAB_ERR_IO = 4,
  SEGLAB_ERR_INVALID_ARGUMENT = 5,
  SEGLAB_ERR_DOMAIN = 6,
  SEGLAB_ERR_INTERNAL = 7
} seglab_status;

typedef struct seglab_config seglab_config;
typedef struct seglab_state seglab_state;

/* Receives one log line (without newline). */
typedef void (*seglab_log_fn)(const char* line, void* user);

SEGLAB_API const char* seglab_version(void);

/* Message of the last failing call on this thread, "" if none. */
SEGLAB_API const char* seglab_last_error(void);

/* Process exit code for a status: config-like errors map to 1. */
SEGLAB_API int seglab_exit_code(int status);

/* NULL restores the default sink (stderr). */
SEGLAB_API void seglab_set_log(seglab_log_fn fn, void* user);

SEGLAB_API void seglab_string_free(char* s);

/* Configuration */
SEGLAB_API int seglab_config_default(seglab_config** out);
SEGLAB_API int seglab_config_load(const char* path, seglab_config** out);
SEGLAB_API int seglab_config_parse(const char* text, seglab_config** out);
SEGLAB_API int seglab_config_set(seglab_config* cfg, const char* section, const char* key,
                                 const char* value);
/* Canonical key = value text; release with seglab_string_free. */
SEGLAB_API int seglab_config_render(const seglab_config* cfg, char** out);
SEGLAB_API const char* seglab_config_help(void);
/* flag <= 0 means "not given": SEGLAB_WORKERS, then [run] workers, then 1. */
SEGLAB_API int seglab_resolve_workers(const seglab_config* cfg, int flag, int* out);
SEGLAB_API void seglab_config_free(seglab_config* cfg);

/* Pipelines. The return value is the status; 2 and 3 report an unconverged
   stage or a violated invariant after all artifacts were written. */
SEGLAB_API int seglab_run_sweep(const seglab_config* cfg, const char* out_dir, int workers);
/* state_path may be NULL for a cold start. */
SEGLAB_API int seglab_run_solve(const seglab_config* cfg, const char* out_dir, int workers,
                                const char* state_path);
/* kind: "acf", "pohozaev", "holder", "overlap" or "decay". */
SEGLAB_API int seglab_run_diag(const seglab_config* cfg, const char* kind, const char* state_path,
                               const char* out_dir, int workers);
SEGLAB_API int seglab_run_report(const seglab_config* cfg, const char* out_dir, int workers);

/* Arc search on the unit circle; json_out (may be NULL) receives the result
   document, release with seglab_string_free. */
SEGLAB_API int seglab_sphere(int k, int max_arcs, int resolution, int workers, const char* out_dir,
                             char** json_out);

/* States */
SEGLAB_API int seglab_state_load(const seglab_config* cfg, const char* path, seglab_state** out);
SEGLAB_API int seglab_state_info(const seglab_state* st, int* nx, int* ny, double* beta);
/* out[0..2] Dirichlet energies, out[3] interaction, out[4] total. */
SEGLAB_API int seglab_state_energy(const seglab_state* st, double out[5]);
/* Copies component comp (0..2) row by row; len must be nx*ny. */
SEGLAB_API int seglab_state_values(const seglab_state* st, int comp, double* buf, size_t len);
SEGLAB_API void seglab_state_free(seglab_state* st);

#ifdef __cplusplus
}
#endif

#endif
