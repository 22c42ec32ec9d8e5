#ifndef DGMT_H
#define DGMT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  DGMT_STATUS_OK = 0,
  DGMT_STATUS_NULL_POINTER = 1,
  DGMT_STATUS_INVALID_STRING = 2,
  DGMT_STATUS_DIMENSION = 3,
  DGMT_STATUS_BUDGET_EXHAUSTED = 4,
  DGMT_STATUS_DEGENERATE_INPUT = 5,
  DGMT_STATUS_PARAMETER = 6,
  DGMT_STATUS_INSUFFICIENT_POPULATION = 7,
  DGMT_STATUS_INFEASIBLE_PARTITION = 8,
  DGMT_STATUS_CALIBRATION_FAILED = 9,
  DGMT_STATUS_TRANSCRIPT = 10,
  DGMT_STATUS_AUDIT_VIOLATION = 11,
  DGMT_STATUS_BUFFER_TOO_SMALL = 12,
  DGMT_STATUS_PANIC = 13,
} DgmtStatus;

typedef enum {
  DGMT_MEAN_MODE_NULL = 0,
  DGMT_MEAN_MODE_SPIKE = 1,
  DGMT_MEAN_MODE_SPREAD = 2,
  DGMT_MEAN_MODE_RANDOM_DIRECTION = 3,
} DgmtMeanMode;

/**
 * A validated population config.
 */
typedef struct DgmtConfig DgmtConfig;

/**
 * Error-rate estimate over many trials.
 */
typedef struct DgmtEstimate DgmtEstimate;

/**
 * The decision and transcript of one trial.
 */
typedef struct DgmtTrial DgmtTrial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *dgmt_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *dgmt_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void dgmt_string_free(char *s);

/**
 * Normalized Walsh-Hadamard transform of `data[0..len]` in place.
 *
 * # Safety
 * `data` must point to `len` writable doubles.
 */
DgmtStatus dgmt_fwht(double *data, size_t len);

/**
 * Collision statistic of `n` binary rows of length `dim`, stored row-major
 * as one byte per bit (nonzero means 1).
 *
 * # Safety
 * `bits` must point to `n * dim` readable bytes and `out` to a writable double.
 */
DgmtStatus dgmt_collision_statistic(const uint8_t *bits, size_t n, size_t dim, double *out);

/**
 * Parses and validates a JSON population config.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
DgmtStatus dgmt_config_from_json(const char *json, DgmtConfig **out);

/**
 * # Safety
 * `config` must be null or a handle from [`dgmt_config_from_json`] not yet freed.
 */
void dgmt_config_free(DgmtConfig *config);

/**
 * Number of users, or 0 for a null handle.
 *
 * # Safety
 * `config` must be null or a live handle.
 */
size_t dgmt_config_num_users(const DgmtConfig *config);

/**
 * Config serialized as JSON; free with [`dgmt_string_free`]. Null on failure.
 *
 * # Safety
 * `config` must be null or a live handle.
 */
char *dgmt_config_to_json(const DgmtConfig *config);

/**
 * Runs one trial. The same `(config, mode, seed, trial)` always gives the
 * same result.
 *
 * # Safety
 * `config` must be a live handle; `out` must be writable.
 */
DgmtStatus dgmt_run_trial(const DgmtConfig *config,
                          DgmtMeanMode mode,
                          uint64_t master_seed,
                          size_t trial,
                          DgmtTrial **out);

/**
 * # Safety
 * `trial` must be null or a handle from [`dgmt_run_trial`] not yet freed.
 */
void dgmt_trial_free(DgmtTrial *trial);

/**
 * Writes true to `rejects` if the referee rejected the null.
 *
 * # Safety
 * `trial` must be a live handle; `rejects` must be writable.
 */
DgmtStatus dgmt_trial_rejects(const DgmtTrial *trial, bool *rejects);

/**
 * Total message bits and shared bits consumed by the trial.
 *
 * # Safety
 * `trial` must be a live handle; both outputs must be writable.
 */
DgmtStatus dgmt_trial_bits(const DgmtTrial *trial, size_t *bits_total, size_t *public_bits_used);

/**
 * Copies the binary transcript into `buf`. `len` always receives the
 * required size; pass a null `buf` to query it. Returns `BufferTooSmall`
 * if `cap < *len`.
 *
 * # Safety
 * `trial` must be a live handle, `len` writable, and `buf` null or valid for
 * `cap` bytes.
 */
DgmtStatus dgmt_trial_transcript(const DgmtTrial *trial, uint8_t *buf, size_t cap, size_t *len);

/**
 * Checks the trial's transcript against the config's budgets.
 *
 * # Safety
 * Both handles must be live.
 */
DgmtStatus dgmt_trial_audit(const DgmtTrial *trial, const DgmtConfig *config);

/**
 * Runs `trials` trials per configured mean mode.
 *
 * # Safety
 * `config` must be a live handle; `out` must be writable.
 */
DgmtStatus dgmt_estimate_error(const DgmtConfig *config,
                               size_t trials,
                               uint64_t master_seed,
                               DgmtEstimate **out);

/**
 * # Safety
 * `est` must be null or a handle from [`dgmt_estimate_error`] not yet freed.
 */
void dgmt_estimate_free(DgmtEstimate *est);

/**
 * Error rate of one mean mode. `Parameter` if the mode was not run.
 *
 * # Safety
 * `est` must be a live handle; `rate` must be writable.
 */
DgmtStatus dgmt_estimate_rate(const DgmtEstimate *est, DgmtMeanMode mode, double *rate);

/**
 * Largest error rate over the modes run; NaN for a null handle.
 *
 * # Safety
 * `est` must be null or a live handle.
 */
double dgmt_estimate_worst_rate(const DgmtEstimate *est);

/**
 * Number of trials whose transcript failed the budget audit.
 *
 * # Safety
 * `est` must be null or a live handle.
 */
size_t dgmt_estimate_audit_violations(const DgmtEstimate *est);

/**
 * JSON summary; free with [`dgmt_string_free`]. Null on failure.
 *
 * # Safety
 * `est` must be null or a live handle.
 */
char *dgmt_estimate_summary_json(const DgmtEstimate *est);

/**
 * Per-trial decision log as CSV; free with [`dgmt_string_free`]. Null on failure.
 *
 * # Safety
 * `est` must be null or a live handle.
 */
char *dgmt_estimate_csv(const DgmtEstimate *est);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DGMT_H */
