//! C ABI over the `illposed` diagnostics.
//!
//! Every function returns an [`IllposedStatus`] (or a plain value where no
//! failure is possible) and writes results through out-pointers. Handles are
//! opaque and must be released with the matching `_free` function. After a
//! non-OK status, `illposed_last_error()` describes the failure on the calling
//! thread.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use illposed::blowup::{self, BlowupConfig, Verdict};
use illposed::cooling::{self, CoolingError, CoolingObservations, FeasibilityVerdict};
use illposed::ode::{self, Ivp, Method, Trajectory};
use illposed::recurrence::{self, RecurrenceInstance};
use illposed::Expression;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IllposedStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    EvalError = 4,
    NoRoot = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IllposedMethod {
    Euler = 0,
    Rk4 = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IllposedBlowupVerdict {
    BlowupDetected = 0,
    BoundedOnInterval = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IllposedCoolingVerdict {
    Feasible = 0,
    SignContradiction = 1,
    ColinearDegenerate = 2,
    BelowAbsoluteZero = 3,
    NonMonotoneData = 4,
}

/// Parsed expression.
pub struct IllposedExpr(Expression);

/// Integrated trajectory `(n, x_n, y_n)`.
pub struct IllposedTrajectory(Trajectory);

/// Fields not relevant to `verdict` are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct IllposedBlowupResult {
    pub verdict: IllposedBlowupVerdict,
    pub x_estimate: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub x_end: f64,
    pub max_abs_y: f64,
}

/// `t_m`, `k` and `residuals` are NaN when `has_params` is false.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct IllposedCoolingFit {
    pub verdict: IllposedCoolingVerdict,
    pub has_params: bool,
    pub t_m: f64,
    pub k: f64,
    pub residuals: [f64; 3],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: IllposedStatus, msg: impl Into<String>) -> IllposedStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> IllposedStatus) -> IllposedStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(IllposedStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, IllposedStatus> {
    if p.is_null() {
        return Err(fail(IllposedStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            IllposedStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(IllposedStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message for the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn illposed_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `source`. On a parse error `*error_offset` (if non-null) receives
/// the byte offset of the problem.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn illposed_expr_parse(
    source: *const c_char,
    out: *mut *mut IllposedExpr,
    error_offset: *mut usize,
) -> IllposedStatus {
    guard(|| {
        non_null!(out);
        let src = try_ffi!(str_arg(source, "source"));
        match Expression::parse(src) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(IllposedExpr(e)));
                IllposedStatus::Ok
            }
            Err(e) => {
                if !error_offset.is_null() {
                    *error_offset = e.offset();
                }
                fail(IllposedStatus::ParseError, e.to_string())
            }
        }
    })
}

/// Evaluates with `n` bindings `names[i] = values[i]`.
///
/// # Safety
/// `expr` must come from `illposed_expr_parse`; `names` and `values` must
/// hold `n` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn illposed_expr_eval(
    expr: *const IllposedExpr,
    names: *const *const c_char,
    values: *const f64,
    n: usize,
    out: *mut f64,
) -> IllposedStatus {
    guard(|| {
        non_null!(expr, out);
        if n > 0 {
            non_null!(names, values);
        }
        let mut bindings = Vec::with_capacity(n);
        for i in 0..n {
            let name = try_ffi!(str_arg(*names.add(i), "binding name"));
            bindings.push((name, *values.add(i)));
        }
        match (*expr).0.evaluate(&bindings[..]) {
            Ok(v) => {
                *out = v;
                IllposedStatus::Ok
            }
            Err(e) => fail(IllposedStatus::EvalError, e.to_string()),
        }
    })
}

/// # Safety
/// `expr` must be null or come from `illposed_expr_parse`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn illposed_expr_free(expr: *mut IllposedExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Integrates `y' = rhs(x, y)` for `steps` steps of size `h`; `method` is an
/// `IllposedMethod` value. An early stop
/// (domain error or overflow) is not a failure; see
/// `illposed_trajectory_terminated_early`.
///
/// # Safety
/// `rhs` must come from `illposed_expr_parse`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn illposed_integrate(
    rhs: *const IllposedExpr,
    x0: f64,
    y0: f64,
    h: f64,
    steps: usize,
    method: u32,
    out: *mut *mut IllposedTrajectory,
) -> IllposedStatus {
    guard(|| {
        non_null!(rhs, out);
        let ivp = match Ivp::new((*rhs).0.clone(), x0, y0) {
            Ok(ivp) => ivp,
            Err(e) => return fail(IllposedStatus::InvalidArgument, e.to_string()),
        };
        let method = match method {
            m if m == IllposedMethod::Euler as u32 => Method::Euler,
            m if m == IllposedMethod::Rk4 as u32 => Method::Rk4,
            m => {
                return fail(
                    IllposedStatus::InvalidArgument,
                    format!("unknown method {m}"),
                )
            }
        };
        match ode::integrate(&ivp, h, steps, method) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(IllposedTrajectory(t)));
                IllposedStatus::Ok
            }
            Err(e) => fail(IllposedStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Number of stored points, including the initial one.
///
/// # Safety
/// `traj` must come from `illposed_integrate`.
#[no_mangle]
pub unsafe extern "C" fn illposed_trajectory_len(traj: *const IllposedTrajectory) -> usize {
    if traj.is_null() {
        return 0;
    }
    (*traj).0.points.len()
}

/// # Safety
/// `traj` must come from `illposed_integrate`.
#[no_mangle]
pub unsafe extern "C" fn illposed_trajectory_terminated_early(
    traj: *const IllposedTrajectory,
) -> bool {
    !traj.is_null() && (*traj).0.terminated_early()
}

/// # Safety
/// `traj` must come from `illposed_integrate`; `x` and `y` must be writable.
#[no_mangle]
pub unsafe extern "C" fn illposed_trajectory_point(
    traj: *const IllposedTrajectory,
    index: usize,
    x: *mut f64,
    y: *mut f64,
) -> IllposedStatus {
    non_null!(traj, x, y);
    let traj = &*traj;
    match traj.0.points.get(index) {
        Some(p) => {
            *x = p.x;
            *y = p.y;
            IllposedStatus::Ok
        }
        None => fail(
            IllposedStatus::InvalidArgument,
            format!("index {index} out of range"),
        ),
    }
}

/// # Safety
/// `traj` must be null or come from `illposed_integrate`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn illposed_trajectory_free(traj: *mut IllposedTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Blow-up diagnosis by step refinement. Non-positive `threshold`, `h0` or
/// `tolerance` and `levels == 0` select the library defaults.
///
/// # Safety
/// `rhs` must come from `illposed_expr_parse`; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn illposed_blowup_estimate(
    rhs: *const IllposedExpr,
    x0: f64,
    y0: f64,
    x_max: f64,
    threshold: f64,
    h0: f64,
    levels: usize,
    tolerance: f64,
    cross_check: bool,
    out: *mut IllposedBlowupResult,
) -> IllposedStatus {
    guard(|| {
        non_null!(rhs, out);
        let ivp = match Ivp::new((*rhs).0.clone(), x0, y0) {
            Ok(ivp) => ivp,
            Err(e) => return fail(IllposedStatus::InvalidArgument, e.to_string()),
        };
        if !(x_max > x0) {
            return fail(IllposedStatus::InvalidArgument, "x_max must exceed x0");
        }
        let d = BlowupConfig::default();
        let pick = |v: f64, default: f64| if v > 0.0 { v } else { default };
        let cfg = BlowupConfig {
            threshold: pick(threshold, d.threshold),
            h0: pick(h0, d.h0),
            levels: if levels == 0 { d.levels } else { levels },
            tolerance: pick(tolerance, d.tolerance),
            cross_check,
        };
        let report = blowup::estimate_blowup(&ivp, x_max, &cfg);
        let mut r = IllposedBlowupResult {
            verdict: IllposedBlowupVerdict::Inconclusive,
            x_estimate: f64::NAN,
            bracket_lo: f64::NAN,
            bracket_hi: f64::NAN,
            x_end: f64::NAN,
            max_abs_y: f64::NAN,
        };
        match report.verdict {
            Verdict::BlowupDetected {
                x_estimate,
                bracket,
            } => {
                r.verdict = IllposedBlowupVerdict::BlowupDetected;
                r.x_estimate = x_estimate;
                (r.bracket_lo, r.bracket_hi) = bracket;
            }
            Verdict::BoundedOnInterval { x_end, max_abs_y } => {
                r.verdict = IllposedBlowupVerdict::BoundedOnInterval;
                r.x_end = x_end;
                r.max_abs_y = max_abs_y;
            }
            Verdict::Inconclusive { reason } => set_error(reason),
        }
        *out = r;
        IllposedStatus::Ok
    })
}

/// Three-reading cooling fit from temperatures at `0`, `t1` and `2*t1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn illposed_cooling_fit(
    t1: f64,
    temp0: f64,
    temp1: f64,
    temp2: f64,
    floor: f64,
    out: *mut IllposedCoolingFit,
) -> IllposedStatus {
    guard(|| {
        non_null!(out);
        let obs = match CoolingObservations::new(t1, temp0, temp1, temp2) {
            Ok(o) => o,
            Err(e) => return fail(IllposedStatus::InvalidArgument, e.to_string()),
        };
        let fit = cooling::fit_three_point(&obs, floor);
        let verdict = match fit.verdict {
            FeasibilityVerdict::Feasible => IllposedCoolingVerdict::Feasible,
            FeasibilityVerdict::SignContradiction => IllposedCoolingVerdict::SignContradiction,
            FeasibilityVerdict::ColinearDegenerate => IllposedCoolingVerdict::ColinearDegenerate,
            FeasibilityVerdict::BelowAbsoluteZero => IllposedCoolingVerdict::BelowAbsoluteZero,
            FeasibilityVerdict::NonMonotoneData => IllposedCoolingVerdict::NonMonotoneData,
        };
        *out = IllposedCoolingFit {
            verdict,
            has_params: fit.params.is_some(),
            t_m: fit.params.map_or(f64::NAN, |p| p.t_m),
            k: fit.params.map_or(f64::NAN, |p| p.k),
            residuals: fit.residuals().unwrap_or([f64::NAN; 3]),
        };
        IllposedStatus::Ok
    })
}

/// Admissible middle readings `c_low < c <= c_high` for end readings `temp0`
/// and `temp2`.
///
/// # Safety
/// `c_low` and `c_high` must be writable.
#[no_mangle]
pub unsafe extern "C" fn illposed_cooling_range(
    temp0: f64,
    temp2: f64,
    floor: f64,
    c_low: *mut f64,
    c_high: *mut f64,
) -> IllposedStatus {
    guard(|| {
        non_null!(c_low, c_high);
        match cooling::feasible_midpoint_range(temp0, temp2, floor) {
            Ok(r) => {
                *c_low = r.c_low;
                *c_high = r.c_high;
                IllposedStatus::Ok
            }
            Err(e @ CoolingError::NoRoot { .. }) => fail(IllposedStatus::NoRoot, e.to_string()),
            Err(e) => fail(IllposedStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Closed-form `x_n` of the averaging recurrence with `x_0 = a`, `x_1 = b`.
#[no_mangle]
pub extern "C" fn illposed_recurrence_closed_form(a: f64, b: f64, n: usize) -> f64 {
    recurrence::closed_form(RecurrenceInstance::new(a, b), n)
}

/// Limit `(a + 2b)/3` of the averaging recurrence.
#[no_mangle]
pub extern "C" fn illposed_recurrence_limit(a: f64, b: f64) -> f64 {
    RecurrenceInstance::new(a, b).limit()
}
