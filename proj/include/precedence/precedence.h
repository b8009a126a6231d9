/* C interface to the precedence library.
 *
 * Every fallible call returns a prec_status; on failure prec_last_error()
 * describes the most recent error on the calling thread. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * prec_string_free. Handles are not thread-safe; use one per thread. */
#ifndef PRECEDENCE_PRECEDENCE_H
#define PRECEDENCE_PRECEDENCE_H

#include <stddef.h>
#include <stdint.h>

#if defined(PRECEDENCE_BUILDING_LIBRARY)
#define PREC_API __attribute__((visibility("default")))
#else
#define PREC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum prec_status {
  PREC_OK = 0,
  PREC_ERR_INVALID_ARGUMENT = 1,
  PREC_ERR_INVALID_STATE = 2,
  PREC_ERR_DIMENSION_MISMATCH = 3,
  PREC_ERR_IMPOSSIBLE_POSTSELECTION = 4,
  PREC_ERR_NOT_INFORMATIONALLY_COMPLETE = 5,
  PREC_ERR_OUT_OF_RANGE = 6,
  PREC_ERR_IO = 7,
  PREC_ERR_PARSE = 8,
  PREC_ERR_CONFIG = 9,
  PREC_ERR_INTERNAL = 100
} prec_status;

typedef enum prec_regime { PREC_REGIME_FREEDOM = 0, PREC_REGIME_BUILDUP = 1, PREC_REGIME_PRECEDENCE = 2 } prec_regime;

typedef struct prec_ledger prec_ledger;
typedef struct prec_engine prec_engine;

PREC_API const char* prec_version(void);
PREC_API const char* prec_status_name(prec_status status);
/* Message of the last failed call on this thread; "" if none. */
PREC_API const char* prec_last_error(void);
PREC_API void prec_string_free(char* s);

PREC_API prec_status prec_ledger_create(prec_ledger** out);
/* PREC_ERR_IO if the file cannot be read, PREC_ERR_PARSE if it is malformed. */
PREC_API prec_status prec_ledger_load(const char* path, prec_ledger** out);
PREC_API prec_status prec_ledger_save(const prec_ledger* ledger, const char* path);
PREC_API void prec_ledger_destroy(prec_ledger* ledger);
PREC_API prec_status prec_ledger_size(const prec_ledger* ledger, uint64_t* out);
/* filter: "PREP:MEAS" hex digests, or NULL for every stream. */
PREC_API prec_status prec_ledger_inspect(const prec_ledger* ledger, const char* filter, char** out_text);

/* JSON report of the freedom-count checks for capacities 2..max_n. */
PREC_API prec_status prec_postulate_report(uint32_t max_n, char** out_json);

/* Runs one study from a JSON run config. out_dir overrides the config's
 * output_dir when non-NULL; env_seed (PRECEDENCE_SEED) overrides its seed
 * when non-NULL. On success *out_summary holds the summary JSON. */
PREC_API prec_status prec_run_config(const char* config_json, const char* out_dir, const char* env_seed,
                                     char** out_summary);

/* Measurement engine over a caller-owned ledger, which must outlive it.
 * policy_json is a policy object as in a run config ("{}" for defaults). */
PREC_API prec_status prec_engine_create(const char* policy_json, uint64_t seed, prec_ledger* ledger,
                                        prec_engine** out);
PREC_API void prec_engine_destroy(prec_engine* engine);
/* Prepares the pure state with amplitudes re[k] + i im[k] (normalized
 * internally; im may be NULL) and measures it in the computational basis. */
PREC_API prec_status prec_engine_measure_pure(prec_engine* engine, const double* re, const double* im, size_t dim,
                                              int32_t* out_outcome, prec_regime* out_regime);

#ifdef __cplusplus
}
#endif

#endif
