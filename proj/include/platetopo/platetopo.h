/* C interface of the platetopo plate shape/topology optimizer. */
#ifndef PLATETOPO_H
#define PLATETOPO_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(PLATETOPO_BUILDING_LIBRARY)
#define PT_API __attribute__((visibility("default")))
#else
#define PT_API
#endif

typedef enum pt_status {
  PT_OK = 0,
  PT_ERR_ARGUMENT = 1,
  PT_ERR_DOMAIN = 2,
  PT_ERR_GEOMETRY = 3,
  PT_ERR_DEGENERATE_GRADIENT = 4,
  PT_ERR_NO_CLOSURE = 5,
  PT_ERR_SINGULAR_SYSTEM = 6,
  PT_ERR_DEGENERATE_STEP = 7,
  PT_ERR_IO = 8,
  PT_ERR_INTERNAL = 99
} pt_status;

typedef struct pt_config pt_config;
typedef struct pt_run pt_run;

typedef struct pt_cost_row {
  int iter;
  double t1, t2, t3, J, lambda;
  int components;
} pt_cost_row;

PT_API const char* pt_version(void);
PT_API const char* pt_status_string(pt_status status);
/* Message of the last failed call on this thread ("" if none). */
PT_API const char* pt_last_error(void);

PT_API pt_status pt_config_default(pt_config** out);
/* "test1", "test2a", "test2b" or "test3". */
PT_API pt_status pt_config_preset(const char* name, pt_config** out);
/* "key = value" lines applied on top of cfg. */
PT_API pt_status pt_config_parse_text(pt_config* cfg, const char* text);
PT_API pt_status pt_config_parse_file(pt_config* cfg, const char* path);
PT_API pt_status pt_config_set(pt_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated, truncated to buflen); *needed
   receives the full length including the terminator. */
PT_API pt_status pt_config_get(const pt_config* cfg, const char* key, char* buf, size_t buflen, size_t* needed);
PT_API void pt_config_free(pt_config* cfg);

typedef void (*pt_progress_fn)(void* user, const pt_cost_row* row);

/* Runs the optimizer. Outputs go to the config's output_dir when set. A run
   that stops on a module error still returns PT_OK with a run handle; see
   pt_run_stop_reason and pt_run_error. */
PT_API pt_status pt_run_optimizer(const pt_config* cfg, pt_progress_fn progress, void* user, pt_run** out);
PT_API int pt_run_iterations(const pt_run* run);
PT_API size_t pt_run_row_count(const pt_run* run);
PT_API pt_status pt_run_row(const pt_run* run, size_t index, pt_cost_row* out);
/* "tolerance", "max_iters", "converged_zero_direction" or "error". */
PT_API const char* pt_run_stop_reason(const pt_run* run);
PT_API const char* pt_run_error(const pt_run* run);
PT_API pt_status pt_run_error_status(const pt_run* run);
PT_API int pt_run_slope_violations(const pt_run* run);
PT_API int pt_run_no_decrease(const pt_run* run);
PT_API int pt_run_orbit_failures(const pt_run* run);
PT_API double pt_run_seconds(const pt_run* run);
PT_API void pt_run_free(pt_run* run);

typedef void (*pt_check_fn)(void* user, const char* name, int passed, const char* detail);

/* Property suite; *n_failed receives the number of failed checks. */
PT_API pt_status pt_verify(pt_check_fn callback, void* user, int* n_failed);

#ifdef __cplusplus
}
#endif

#endif /* PLATETOPO_H */
