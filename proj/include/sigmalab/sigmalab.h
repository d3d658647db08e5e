/* SPDX-License-Identifier: Apache-2.0 */
#ifndef SIGMALAB_SIGMALAB_H
#define SIGMALAB_SIGMALAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(SIGMALAB_BUILDING_LIBRARY)
#define SL_API __attribute__((visibility("default")))
#else
#define SL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The first four double as CLI exit codes. */
typedef enum sl_status {
  SL_OK = 0,
  SL_FAILED = 1,          /* an identity or check did not pass */
  SL_ERR_CONFIG = 2,      /* malformed config, spec or input table */
  SL_ERR_TRUNCATION = 3,  /* truncated fraction above budget after escalation */
  SL_ERR_ARGUMENT = 4,    /* null handle or bad argument to the API itself */
  SL_ERR_INTERNAL = 5
} sl_status;

typedef struct sl_config sl_config;
typedef struct sl_report sl_report;

typedef struct sl_check {
  const char* name; /* valid while the owning report lives */
  double estimate;
  double target;
  double se;
  double tolerance;
  int pass;
} sl_check;

SL_API const char* sl_version(void);

/* Message of the last failing call on this thread ("" if none). */
SL_API const char* sl_last_error(void);

/* Offending row of the last input-table error on this thread, or -1. */
SL_API long sl_last_error_row(void);

SL_API void sl_string_free(char* s);

/* ---- configuration ---- */
SL_API sl_status sl_config_new(sl_config** out);
SL_API void sl_config_free(sl_config* cfg);
/* Merge a JSON document (object) or a JSON file on top of the current keys. */
SL_API sl_status sl_config_merge_json(sl_config* cfg, const char* json_text);
SL_API sl_status sl_config_merge_file(sl_config* cfg, const char* path);
/* Set one key; `value` is JSON text, or a bare string for string-valued keys. */
SL_API sl_status sl_config_set(sl_config* cfg, const char* key, const char* value);
SL_API sl_status sl_config_set_seed(sl_config* cfg, uint64_t seed);
SL_API sl_status sl_config_set_threads(sl_config* cfg, unsigned threads);
/* Current override document as JSON; free with sl_string_free. */
SL_API sl_status sl_config_to_json(const sl_config* cfg, char** out);

/* ---- identities ---- */
SL_API size_t sl_identity_count(void);
/* Registered id at position i, or NULL. */
SL_API const char* sl_identity_id(size_t i);

SL_API sl_status sl_run_identity(const sl_config* cfg, const char* id, sl_report** out);
SL_API void sl_report_free(sl_report* r);
SL_API int sl_report_pass(const sl_report* r);
SL_API int sl_report_truncation_failed(const sl_report* r);
SL_API double sl_report_truncated_fraction(const sl_report* r);
SL_API size_t sl_report_check_count(const sl_report* r);
SL_API sl_status sl_report_check(const sl_report* r, size_t i, sl_check* out);
/* Report as JSON / as summary CSV rows (with header); free with sl_string_free. */
SL_API sl_status sl_report_json(const sl_report* r, char** out);
SL_API sl_status sl_report_csv(const sl_report* r, char** out);

/* ---- commands: write their files under the config's output_dir ----
 * The return value is the command outcome (SL_OK, SL_FAILED, SL_ERR_CONFIG,
 * SL_ERR_TRUNCATION, ...). `summary`, when non-null, receives terminal text to be
 * freed with sl_string_free (NULL on error). */
SL_API sl_status sl_cmd_verify(const sl_config* cfg, const char* id, char** summary);
SL_API sl_status sl_cmd_embed(const sl_config* cfg, char** summary);
SL_API sl_status sl_cmd_psi(const sl_config* cfg, char** summary);
SL_API sl_status sl_cmd_bachelier(const sl_config* cfg, char** summary);
SL_API sl_status sl_cmd_simulate(const sl_config* cfg, char** summary);

/* ---- numerics ---- */
SL_API void sl_philox4x32(const uint32_t counter[4], const uint32_t key[2], uint32_t out[4]);
/* n_steps N(0, dt) increments of path `path_index` under `seed`. */
SL_API sl_status sl_gaussian_increments(uint64_t seed, uint64_t path_index, double dt, int64_t n_steps, double* out);
/* Psi of `law_spec` at n points. */
SL_API sl_status sl_psi_eval(const char* law_spec, const double* x, size_t n, double* out);
/* Embedding barrier phi of `law_spec` at n points. */
SL_API sl_status sl_phi_eval(const char* law_spec, const double* z, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif
