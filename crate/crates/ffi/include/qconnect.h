#ifndef QCONNECT_H
#define QCONNECT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  // Bad modulus, truncation, parameter, name or UTF-8.
  QC_STATUS_INVALID_ARGUMENT = 2,
  // The point or parameter lies on an excluded set (spiral, pole, outside radius).
  QC_STATUS_DOMAIN = 3,
  // Truncation limit, non-convergence or overflow.
  QC_STATUS_NUMERICAL = 4,
  // The requested quantity does not exist, e.g. `max_rel_err` with no evaluated point.
  QC_STATUS_NO_VALUE = 5,
  // A Rust panic was caught at the boundary.
  QC_STATUS_PANIC = 6,
} QcStatus;

// Modulus plus truncation policy shared by evaluations and checks.
typedef struct QcContext QcContext;

// Result of one identity check.
typedef struct QcReport QcReport;

typedef struct QcComplex {
  double re;
  double im;
} QcComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next `qc_*` call on the same thread.
const char *qc_last_error(void);

// Creates a context for base `q` (0 < |q| < 1) with the default truncation.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum QcStatus qc_context_new(struct QcComplex q, struct QcContext **out);

// Replaces the truncation policy: stop once 3 consecutive terms fall below `eps`
// relative to the partial result; fail after `n_max` terms.
//
// # Safety
// `ctx` must come from `qc_context_new` and not have been freed.
enum QcStatus qc_context_set_truncation(struct QcContext *ctx, double eps, size_t n_max);

// # Safety
// `ctx` must be null or come from `qc_context_new`; it must not be used afterwards.
void qc_context_free(struct QcContext *ctx);

// Evaluates a function by its CLI name (`Aq`, `Aiq`, `theta`, `eq`, `Eq`, `rphis`,
// `2f0`, `2f0-closed`, `f-residues`, `g-borel`).
//
// `lambda` may be null for functions that do not take it. `upper`/`lower` are the
// basic hypergeometric parameters for `rphis` and may be null when their length is 0.
//
// # Safety
// Pointers must be valid for the stated lengths; `function` must be NUL-terminated.
enum QcStatus qc_eval(const struct QcContext *ctx,
                      const char *function,
                      struct QcComplex x,
                      const struct QcComplex *lambda,
                      const struct QcComplex *upper,
                      size_t n_upper,
                      const struct QcComplex *lower,
                      size_t n_lower,
                      struct QcComplex *result);

// Ramanujan's entire function A_q(x).
//
// # Safety
// `ctx` and `result` must be valid.
enum QcStatus qc_ramanujan_aq(const struct QcContext *ctx,
                              struct QcComplex x,
                              struct QcComplex *result);

// The q-Airy function Ai_q(x).
//
// # Safety
// `ctx` and `result` must be valid.
enum QcStatus qc_qairy_ai(const struct QcContext *ctx,
                          struct QcComplex x,
                          struct QcComplex *result);

// Jacobi theta function theta_q(x).
//
// # Safety
// `ctx` and `result` must be valid.
enum QcStatus qc_theta(const struct QcContext *ctx, struct QcComplex x, struct QcComplex *result);

// Small q-exponential e_q(x).
//
// # Safety
// `ctx` and `result` must be valid.
enum QcStatus qc_small_exp(const struct QcContext *ctx,
                           struct QcComplex x,
                           struct QcComplex *result);

// Big q-exponential E_q(x).
//
// # Safety
// `ctx` and `result` must be valid.
enum QcStatus qc_big_exp(const struct QcContext *ctx, struct QcComplex x, struct QcComplex *result);

// Resummed 2phi0(0, 0; -; q, x) in direction `lambda`.
//
// # Safety
// `ctx` and `result` must be valid.
enum QcStatus qc_two_f_zero(const struct QcContext *ctx,
                            struct QcComplex lambda,
                            struct QcComplex x,
                            struct QcComplex *result);

// Runs a named identity check at the context's base.
//
// `lambda` may be null (default direction). With `n_grid == 0` the default grid is
// used. `tol <= 0` keeps the identity's default tolerance.
//
// # Safety
// `identity` must be NUL-terminated, `grid` valid for `n_grid` values, `report` writable.
enum QcStatus qc_check(const struct QcContext *ctx,
                       const char *identity,
                       const struct QcComplex *lambda,
                       const struct QcComplex *grid,
                       size_t n_grid,
                       double tol,
                       struct QcReport **report);

// # Safety
// `report` must be null or come from `qc_check`; it must not be used afterwards.
void qc_report_free(struct QcReport *report);

// Writes 1 to `pass` when the check passed, else 0.
//
// # Safety
// `report` and `pass` must be valid.
enum QcStatus qc_report_pass(const struct QcReport *report, int32_t *pass);

// Largest relative error over evaluated points; `NoValue` when every point was skipped.
//
// # Safety
// `report` and `value` must be valid.
enum QcStatus qc_report_max_rel_err(const struct QcReport *report, double *value);

// Total and evaluated (non-skipped) point counts.
//
// # Safety
// `report`, `total` and `evaluated` must be valid.
enum QcStatus qc_report_counts(const struct QcReport *report, size_t *total, size_t *evaluated);

// Serialises the report to JSON. Release the string with `qc_string_free`.
//
// # Safety
// `report` and `json` must be valid.
enum QcStatus qc_report_json(const struct QcReport *report, char **json);

// # Safety
// `s` must be null or a string returned by this library; it must not be used afterwards.
void qc_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QCONNECT_H */
