#ifndef STACKRES_H
#define STACKRES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StackresStatus {
  STACKRES_STATUS_OK = 0,
  /**
   * A null pointer, bad UTF-8 or an out-of-range argument.
   */
  STACKRES_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The job text does not describe a valid job.
   */
  STACKRES_STATUS_INVALID_JOB = 2,
  /**
   * The job is valid but cannot be resolved as asked (non-rational center,
   * exhausted budget). A partial report is still returned.
   */
  STACKRES_STATUS_UNRESOLVED = 3,
  /**
   * An internal invariant failed. A partial report is still returned.
   */
  STACKRES_STATUS_INTERNAL = 4,
  STACKRES_STATUS_NOT_FOUND = 5,
  STACKRES_STATUS_PANIC = 6,
} StackresStatus;

/**
 * A finished or partial resolution report.
 */
typedef struct StackresReport StackresReport;

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * call into the library from the same thread.
 */
const char *stackres_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *stackres_version(void);

/**
 * Run the job given as TOML text. On `OK`, `UNRESOLVED` and `INTERNAL` a
 * report handle is stored in `*out`; otherwise `*out` is set to NULL.
 *
 * # Safety
 * `job_toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum StackresStatus stackres_run_job(const char *job_toml,
                                     size_t max_steps,
                                     struct StackresReport **out);

/**
 * # Safety
 * `report` must come from `stackres_run_job` and not be used afterwards.
 */
void stackres_report_free(struct StackresReport *report);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void stackres_string_free(char *s);

/**
 * Whether the report is complete.
 *
 * # Safety
 * `report` must be a live handle, `resolved` a valid pointer.
 */
enum StackresStatus stackres_report_is_resolved(const struct StackresReport *report,
                                                bool *resolved);

/**
 * Number of blow-ups performed.
 *
 * # Safety
 * `report` must be a live handle, `count` a valid pointer.
 */
enum StackresStatus stackres_report_blowup_count(const struct StackresReport *report,
                                                 size_t *count);

/**
 * Root index `r` and twist `m` recorded for the divisor labelled `divisor`
 * (for example `E1''`).
 *
 * # Safety
 * `report` must be a live handle, `divisor` NUL-terminated, `r` and `m` valid.
 */
enum StackresStatus stackres_report_root_index(const struct StackresReport *report,
                                               const char *divisor,
                                               uint32_t *r,
                                               uint32_t *m);

/**
 * Deterministic JSON form of the report; free with `stackres_string_free`.
 *
 * # Safety
 * `report` must be a live handle, `out` a valid pointer.
 */
enum StackresStatus stackres_report_json(const struct StackresReport *report, char **out);

/**
 * LaTeX tables of the report; free with `stackres_string_free`.
 *
 * # Safety
 * `report` must be a live handle, `out` a valid pointer.
 */
enum StackresStatus stackres_report_latex(const struct StackresReport *report, char **out);

/**
 * Minimal root index for `k` vanishing orders against `k` weights.
 *
 * # Safety
 * `orders` and `weights` must point to `k` values; `r` and `m` must be valid.
 */
enum StackresStatus stackres_minimal_root_index(const uint32_t *orders,
                                                const uint32_t *weights,
                                                size_t k,
                                                uint32_t *r,
                                                uint32_t *m);

#endif  /* STACKRES_H */
