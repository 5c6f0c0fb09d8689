/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the simulation harness. All handles are opaque; every
 * fallible call returns an rhs_status and, on failure, leaves a message in
 * rhs_last_error() for the calling thread.
 */

#ifndef RHS_RHS_H
#define RHS_RHS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RHS_BUILDING_LIBRARY)
#define RHS_API __declspec(dllexport)
#else
#define RHS_API __declspec(dllimport)
#endif
#else
#define RHS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rhs_status {
  RHS_OK = 0,
  RHS_ERR_INVALID_ARGUMENT = 1, /* null handle, index out of range */
  RHS_ERR_PARSE = 2,            /* malformed config or CSV */
  RHS_ERR_DOMAIN = 3,           /* inconsistent dimensions or parameters */
  RHS_ERR_NUMERIC = 4,          /* singular system, non-finite result */
  RHS_ERR_IO = 5,
  RHS_ERR_INTERNAL = 6
} rhs_status;

typedef struct rhs_config rhs_config;
typedef struct rhs_sweep rhs_sweep;
typedef struct rhs_summary rhs_summary;

typedef struct rhs_row {
  const char *scheme; /* owned by the sweep */
  double p_max_dbm;
  size_t trial;
  uint64_t seed;
  double throughput; /* bits/s/Hz; NaN for failed rows */
  long iterations;   /* -1 for failed rows */
  int converged;
  size_t violations;
  double wall_ms;
  const char *error; /* empty unless the row failed in this process */
} rhs_row;

typedef struct rhs_summary_entry {
  const char *scheme;
  double p_max_dbm;
  size_t count;
  size_t failures;
  double mean;
  double stderr_mean;
} rhs_summary_entry;

typedef void (*rhs_progress_fn)(size_t done, size_t total, void *user);

RHS_API const char *rhs_version(void);
RHS_API const char *rhs_status_string(rhs_status status);
/* Message of the most recent failure on this thread; "" if none. */
RHS_API const char *rhs_last_error(void);

/* For parse errors: offending key and line (0 when unknown). */
RHS_API const char *rhs_last_error_key(void);
RHS_API size_t rhs_last_error_line(void);

RHS_API rhs_status rhs_config_parse(const char *text, rhs_config **out);
RHS_API rhs_status rhs_config_load(const char *path, rhs_config **out);
RHS_API void rhs_config_free(rhs_config *config);

RHS_API rhs_status rhs_config_set_seed(rhs_config *config, uint64_t seed);
RHS_API rhs_status rhs_config_set_trials(rhs_config *config, size_t trials);
RHS_API rhs_status rhs_config_set_threads(rhs_config *config, size_t threads);
RHS_API rhs_status rhs_config_set_timing(rhs_config *config, int enabled);
/* Comma separated list, e.g. "adaptive,fixed,quantized-2bit,zf_random". */
RHS_API rhs_status rhs_config_set_schemes(rhs_config *config, const char *schemes);
/* |schemes| x |p_max list| x trials. */
RHS_API rhs_status rhs_config_row_count(const rhs_config *config, size_t *out);

/* progress may be NULL. It is called from worker threads, serialized. */
RHS_API rhs_status rhs_sweep_run(const rhs_config *config, rhs_progress_fn progress, void *user,
                                 rhs_sweep **out);
RHS_API size_t rhs_sweep_row_count(const rhs_sweep *sweep);
RHS_API size_t rhs_sweep_failure_count(const rhs_sweep *sweep);
RHS_API rhs_status rhs_sweep_row(const rhs_sweep *sweep, size_t index, rhs_row *out);
/* path "-" writes to stdout. */
RHS_API rhs_status rhs_sweep_write_csv(const rhs_sweep *sweep, const char *path);
RHS_API rhs_status rhs_sweep_read_csv(const char *path, rhs_sweep **out);
RHS_API void rhs_sweep_free(rhs_sweep *sweep);

RHS_API rhs_status rhs_summary_compute(const rhs_sweep *sweep, rhs_summary **out);
RHS_API size_t rhs_summary_row_count(const rhs_summary *summary);
RHS_API rhs_status rhs_summary_row(const rhs_summary *summary, size_t index, rhs_summary_entry *out);
RHS_API size_t rhs_summary_warning_count(const rhs_summary *summary);
RHS_API const char *rhs_summary_warning(const rhs_summary *summary, size_t index);
/* path "-" writes to stdout. */
RHS_API rhs_status rhs_summary_write(const rhs_summary *summary, const char *path);
RHS_API void rhs_summary_free(rhs_summary *summary);

#ifdef __cplusplus
}
#endif

#endif /* RHS_RHS_H */
