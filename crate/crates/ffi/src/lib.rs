//! C ABI over `qconnect`.
//!
//! Every function returns a [`QcStatus`]; results go through out-pointers.
//! After a non-zero status, `qc_last_error` holds a message for the calling thread.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qconnect::cli::{evaluate, EvalFunction, EvalParams};
use qconnect::verify::{check, IdentityCheck, IdentityId, IdentityReport};
use qconnect::{QError, QModulus, Truncation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QcComplex {
    pub re: f64,
    pub im: f64,
}

impl From<QcComplex> for Complex64 {
    fn from(z: QcComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for QcComplex {
    fn from(z: Complex64) -> Self {
        QcComplex { re: z.re, im: z.im }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad modulus, truncation, parameter, name or UTF-8.
    InvalidArgument = 2,
    /// The point or parameter lies on an excluded set (spiral, pole, outside radius).
    Domain = 3,
    /// Truncation limit, non-convergence or overflow.
    Numerical = 4,
    /// The requested quantity does not exist, e.g. `max_rel_err` with no evaluated point.
    NoValue = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Modulus plus truncation policy shared by evaluations and checks.
pub struct QcContext {
    q: QModulus,
    trunc: Truncation,
}

/// Result of one identity check.
pub struct QcReport {
    report: IdentityReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(QcStatus, String);

impl From<QError> for Fail {
    fn from(e: QError) -> Self {
        let status = if e.is_domain_exclusion() {
            QcStatus::Domain
        } else {
            match e {
                QError::InvalidModulus(_)
                | QError::InvalidTruncation(_)
                | QError::InvalidParameter(_)
                | QError::BaseMismatch => QcStatus::InvalidArgument,
                _ => QcStatus::Numerical,
            }
        };
        Fail(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            QcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside qconnect");
            QcStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(QcStatus::NullPointer, "null pointer argument".into())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn name<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(QcStatus::InvalidArgument, "name is not valid UTF-8".into()))
}

unsafe fn slice(p: *const QcComplex, n: usize) -> Result<Vec<Complex64>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, n)
        .iter()
        .map(|&z| z.into())
        .collect())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `qc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn qc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a context for base `q` (0 < |q| < 1) with the default truncation.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qc_context_new(q: QcComplex, out: *mut *mut QcContext) -> QcStatus {
    guard(|| {
        let slot = self::out(out)?;
        let q = QModulus::new(q.into())?;
        *slot = Box::into_raw(Box::new(QcContext {
            q,
            trunc: Truncation::default(),
        }));
        Ok(())
    })
}

/// Replaces the truncation policy: stop once 3 consecutive terms fall below `eps`
/// relative to the partial result; fail after `n_max` terms.
///
/// # Safety
/// `ctx` must come from `qc_context_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qc_context_set_truncation(
    ctx: *mut QcContext,
    eps: f64,
    n_max: usize,
) -> QcStatus {
    guard(|| {
        let ctx = out(ctx)?;
        ctx.trunc = Truncation::new(eps, n_max, Truncation::DEFAULT.streak)?;
        Ok(())
    })
}

/// # Safety
/// `ctx` must be null or come from `qc_context_new`; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_context_free(ctx: *mut QcContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Evaluates a function by its CLI name (`Aq`, `Aiq`, `theta`, `eq`, `Eq`, `rphis`,
/// `2f0`, `2f0-closed`, `f-residues`, `g-borel`).
///
/// `lambda` may be null for functions that do not take it. `upper`/`lower` are the
/// basic hypergeometric parameters for `rphis` and may be null when their length is 0.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `function` must be NUL-terminated.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qc_eval(
    ctx: *const QcContext,
    function: *const c_char,
    x: QcComplex,
    lambda: *const QcComplex,
    upper: *const QcComplex,
    n_upper: usize,
    lower: *const QcComplex,
    n_lower: usize,
    result: *mut QcComplex,
) -> QcStatus {
    guard(|| {
        let ctx = deref(ctx)?;
        let f: EvalFunction = name(function)?
            .parse()
            .map_err(|e| Fail(QcStatus::InvalidArgument, e))?;
        let params = EvalParams {
            lambda: lambda.as_ref().map(|&l| l.into()),
            upper: slice(upper, n_upper)?,
            lower: slice(lower, n_lower)?,
        };
        let slot = out(result)?;
        *slot = evaluate(f, ctx.q, x.into(), &params, &ctx.trunc)?
            .value
            .into();
        Ok(())
    })
}

unsafe fn eval_simple(
    ctx: *const QcContext,
    f: EvalFunction,
    x: QcComplex,
    lambda: Option<QcComplex>,
    result: *mut QcComplex,
) -> QcStatus {
    guard(|| {
        let ctx = deref(ctx)?;
        let params = EvalParams {
            lambda: lambda.map(Into::into),
            ..Default::default()
        };
        let slot = out(result)?;
        *slot = evaluate(f, ctx.q, x.into(), &params, &ctx.trunc)?
            .value
            .into();
        Ok(())
    })
}

/// Ramanujan's entire function A_q(x).
///
/// # Safety
/// `ctx` and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_ramanujan_aq(
    ctx: *const QcContext,
    x: QcComplex,
    result: *mut QcComplex,
) -> QcStatus {
    eval_simple(ctx, EvalFunction::Aq, x, None, result)
}

/// The q-Airy function Ai_q(x).
///
/// # Safety
/// `ctx` and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_qairy_ai(
    ctx: *const QcContext,
    x: QcComplex,
    result: *mut QcComplex,
) -> QcStatus {
    eval_simple(ctx, EvalFunction::Aiq, x, None, result)
}

/// Jacobi theta function theta_q(x).
///
/// # Safety
/// `ctx` and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_theta(
    ctx: *const QcContext,
    x: QcComplex,
    result: *mut QcComplex,
) -> QcStatus {
    eval_simple(ctx, EvalFunction::Theta, x, None, result)
}

/// Small q-exponential e_q(x).
///
/// # Safety
/// `ctx` and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_small_exp(
    ctx: *const QcContext,
    x: QcComplex,
    result: *mut QcComplex,
) -> QcStatus {
    eval_simple(ctx, EvalFunction::SmallEq, x, None, result)
}

/// Big q-exponential E_q(x).
///
/// # Safety
/// `ctx` and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_big_exp(
    ctx: *const QcContext,
    x: QcComplex,
    result: *mut QcComplex,
) -> QcStatus {
    eval_simple(ctx, EvalFunction::BigEq, x, None, result)
}

/// Resummed 2phi0(0, 0; -; q, x) in direction `lambda`.
///
/// # Safety
/// `ctx` and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_two_f_zero(
    ctx: *const QcContext,
    lambda: QcComplex,
    x: QcComplex,
    result: *mut QcComplex,
) -> QcStatus {
    eval_simple(ctx, EvalFunction::TwoF0, x, Some(lambda), result)
}

/// Runs a named identity check at the context's base.
///
/// `lambda` may be null (default direction). With `n_grid == 0` the default grid is
/// used. `tol <= 0` keeps the identity's default tolerance.
///
/// # Safety
/// `identity` must be NUL-terminated, `grid` valid for `n_grid` values, `report` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_check(
    ctx: *const QcContext,
    identity: *const c_char,
    lambda: *const QcComplex,
    grid: *const QcComplex,
    n_grid: usize,
    tol: f64,
    report: *mut *mut QcReport,
) -> QcStatus {
    guard(|| {
        let ctx = deref(ctx)?;
        let id: IdentityId = name(identity)?.parse()?;
        let mut spec = IdentityCheck::new(id, ctx.q).with_trunc(ctx.trunc);
        if let Some(&l) = lambda.as_ref() {
            spec = spec.with_lambda(l.into());
        }
        if n_grid > 0 {
            spec = spec.with_grid(slice(grid, n_grid)?);
        }
        if tol > 0.0 {
            spec = spec.with_tol(tol);
        }
        let slot = out(report)?;
        let r = check(&spec)?;
        *slot = Box::into_raw(Box::new(QcReport { report: r }));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or come from `qc_check`; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_report_free(report: *mut QcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Writes 1 to `pass` when the check passed, else 0.
///
/// # Safety
/// `report` and `pass` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_report_pass(report: *const QcReport, pass: *mut i32) -> QcStatus {
    guard(|| {
        let r = deref(report)?;
        *out(pass)? = r.report.pass as i32;
        Ok(())
    })
}

/// Largest relative error over evaluated points; `NoValue` when every point was skipped.
///
/// # Safety
/// `report` and `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_report_max_rel_err(
    report: *const QcReport,
    value: *mut f64,
) -> QcStatus {
    guard(|| {
        let r = deref(report)?;
        let slot = out(value)?;
        match r.report.max_rel_err {
            Some(v) => {
                *slot = v;
                Ok(())
            }
            None => Err(Fail(QcStatus::NoValue, "no point was evaluated".into())),
        }
    })
}

/// Total and evaluated (non-skipped) point counts.
///
/// # Safety
/// `report`, `total` and `evaluated` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_report_counts(
    report: *const QcReport,
    total: *mut usize,
    evaluated: *mut usize,
) -> QcStatus {
    guard(|| {
        let r = deref(report)?;
        let (t, e) = (out(total)?, out(evaluated)?);
        *t = r.report.points.len();
        *e = r.report.evaluated();
        Ok(())
    })
}

/// Serialises the report to JSON. Release the string with `qc_string_free`.
///
/// # Safety
/// `report` and `json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_report_json(
    report: *const QcReport,
    json: *mut *mut c_char,
) -> QcStatus {
    guard(|| {
        let r = deref(report)?;
        let slot = out(json)?;
        *slot = ptr::null_mut();
        let text = r.report.to_json()?;
        let c = CString::new(text).map_err(|e| Fail(QcStatus::Numerical, e.to_string()))?;
        *slot = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> QcComplex {
        QcComplex { re, im }
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(qc_last_error()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn invalid_base_is_rejected() {
        let mut ctx = ptr::null_mut();
        assert_eq!(
            unsafe { qc_context_new(c(1.2, 0.0), &mut ctx) },
            QcStatus::InvalidArgument
        );
        assert!(ctx.is_null());
        assert!(!last_error().is_empty());
    }

    #[test]
    fn null_out_pointer() {
        assert_eq!(
            unsafe { qc_context_new(c(0.5, 0.0), ptr::null_mut()) },
            QcStatus::NullPointer
        );
    }

    #[test]
    fn error_message_clears_on_success() {
        let mut ctx = ptr::null_mut();
        unsafe {
            assert_eq!(qc_context_new(c(0.5, 0.0), &mut ctx), QcStatus::Ok);
            let mut v = QcComplex::default();
            assert_eq!(qc_theta(ctx, c(0.0, 0.0), &mut v), QcStatus::Domain);
            assert!(!last_error().is_empty());
            assert_eq!(qc_theta(ctx, c(1.0, 0.0), &mut v), QcStatus::Ok);
            assert_eq!(last_error(), "");
            qc_context_free(ctx);
        }
    }
}
