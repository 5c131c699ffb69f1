#ifndef ILLPOSED_H
#define ILLPOSED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IllposedStatus {
  ILLPOSED_STATUS_OK = 0,
  ILLPOSED_STATUS_NULL_POINTER = 1,
  ILLPOSED_STATUS_INVALID_ARGUMENT = 2,
  ILLPOSED_STATUS_PARSE_ERROR = 3,
  ILLPOSED_STATUS_EVAL_ERROR = 4,
  ILLPOSED_STATUS_NO_ROOT = 5,
  ILLPOSED_STATUS_PANIC = 6,
} IllposedStatus;

typedef enum IllposedBlowupVerdict {
  ILLPOSED_BLOWUP_VERDICT_BLOWUP_DETECTED = 0,
  ILLPOSED_BLOWUP_VERDICT_BOUNDED_ON_INTERVAL = 1,
  ILLPOSED_BLOWUP_VERDICT_INCONCLUSIVE = 2,
} IllposedBlowupVerdict;

typedef enum IllposedCoolingVerdict {
  ILLPOSED_COOLING_VERDICT_FEASIBLE = 0,
  ILLPOSED_COOLING_VERDICT_SIGN_CONTRADICTION = 1,
  ILLPOSED_COOLING_VERDICT_COLINEAR_DEGENERATE = 2,
  ILLPOSED_COOLING_VERDICT_BELOW_ABSOLUTE_ZERO = 3,
  ILLPOSED_COOLING_VERDICT_NON_MONOTONE_DATA = 4,
} IllposedCoolingVerdict;

typedef enum IllposedMethod {
  ILLPOSED_METHOD_EULER = 0,
  ILLPOSED_METHOD_RK4 = 1,
} IllposedMethod;

// Parsed expression.
typedef struct IllposedExpr IllposedExpr;

// Integrated trajectory `(n, x_n, y_n)`.
typedef struct IllposedTrajectory IllposedTrajectory;

// Fields not relevant to `verdict` are NaN.
typedef struct IllposedBlowupResult {
  enum IllposedBlowupVerdict verdict;
  double x_estimate;
  double bracket_lo;
  double bracket_hi;
  double x_end;
  double max_abs_y;
} IllposedBlowupResult;

// `t_m`, `k` and `residuals` are NaN when `has_params` is false.
typedef struct IllposedCoolingFit {
  enum IllposedCoolingVerdict verdict;
  bool has_params;
  double t_m;
  double k;
  double residuals[3];
} IllposedCoolingFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread; empty if none. The pointer
// stays valid until the next failing call on the same thread.
const char *illposed_last_error(void);

// Parses `source`. On a parse error `*error_offset` (if non-null) receives
// the byte offset of the problem.
//
// # Safety
// `source` must be a NUL-terminated string; `out` must be writable.
enum IllposedStatus illposed_expr_parse(const char *source,
                                        struct IllposedExpr **out,
                                        size_t *error_offset);

// Evaluates with `n` bindings `names[i] = values[i]`.
//
// # Safety
// `expr` must come from `illposed_expr_parse`; `names` and `values` must
// hold `n` entries; `out` must be writable.
enum IllposedStatus illposed_expr_eval(const struct IllposedExpr *expr,
                                       const char *const *names,
                                       const double *values,
                                       size_t n,
                                       double *out);

// # Safety
// `expr` must be null or come from `illposed_expr_parse`, and not be used afterwards.
void illposed_expr_free(struct IllposedExpr *expr);

// Integrates `y' = rhs(x, y)` for `steps` steps of size `h`; `method` is an
// `IllposedMethod` value. An early stop
// (domain error or overflow) is not a failure; see
// `illposed_trajectory_terminated_early`.
//
// # Safety
// `rhs` must come from `illposed_expr_parse`; `out` must be writable.
enum IllposedStatus illposed_integrate(const struct IllposedExpr *rhs,
                                       double x0,
                                       double y0,
                                       double h,
                                       size_t steps,
                                       uint32_t method,
                                       struct IllposedTrajectory **out);

// Number of stored points, including the initial one.
//
// # Safety
// `traj` must come from `illposed_integrate`.
size_t illposed_trajectory_len(const struct IllposedTrajectory *traj);

// # Safety
// `traj` must come from `illposed_integrate`.
bool illposed_trajectory_terminated_early(const struct IllposedTrajectory *traj);

// # Safety
// `traj` must come from `illposed_integrate`; `x` and `y` must be writable.
enum IllposedStatus illposed_trajectory_point(const struct IllposedTrajectory *traj,
                                              size_t index,
                                              double *x,
                                              double *y);

// # Safety
// `traj` must be null or come from `illposed_integrate`, and not be used afterwards.
void illposed_trajectory_free(struct IllposedTrajectory *traj);

// Blow-up diagnosis by step refinement. Non-positive `threshold`, `h0` or
// `tolerance` and `levels == 0` select the library defaults.
//
// # Safety
// `rhs` must come from `illposed_expr_parse`; `out` must be writable.
enum IllposedStatus illposed_blowup_estimate(const struct IllposedExpr *rhs,
                                             double x0,
                                             double y0,
                                             double x_max,
                                             double threshold,
                                             double h0,
                                             size_t levels,
                                             double tolerance,
                                             bool cross_check,
                                             struct IllposedBlowupResult *out);

// Three-reading cooling fit from temperatures at `0`, `t1` and `2*t1`.
//
// # Safety
// `out` must be writable.
enum IllposedStatus illposed_cooling_fit(double t1,
                                         double temp0,
                                         double temp1,
                                         double temp2,
                                         double floor,
                                         struct IllposedCoolingFit *out);

// Admissible middle readings `c_low < c <= c_high` for end readings `temp0`
// and `temp2`.
//
// # Safety
// `c_low` and `c_high` must be writable.
enum IllposedStatus illposed_cooling_range(double temp0,
                                           double temp2,
                                           double floor,
                                           double *c_low,
                                           double *c_high);

// Closed-form `x_n` of the averaging recurrence with `x_0 = a`, `x_1 = b`.
double illposed_recurrence_closed_form(double a, double b, size_t n);

// Limit `(a + 2b)/3` of the averaging recurrence.
double illposed_recurrence_limit(double a, double b);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ILLPOSED_H */
