//! C interface: opaque handles for sheet evaluators and logarithmic
//! expansions, plain functions for the Stokes coefficient sequence and the
//! multiplier estimate. Every call returns a `PbStatus`; the message for the
//! last failure on the calling thread is available via `pb_last_error`.

use pbessel::duality::BesselDual;
use pbessel::goursat::{eval_log_expansion_at, log_expansion, LogExpansion};
use pbessel::monodromy::{continue_to_sheet, monodromy_residual, st_sequence, BaseEvaluator, BesselP, MonodromyParams};
use pbessel::pbde_ode::{estimate_t, recessive_p_evaluator, PBDECoefficients, PbdeConfig};
use pbessel::quad::QuadratureConfig;
use pbessel::{AsymptoticSeries, Error, SheetPoint, C64};
use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for PbComplex {
    fn from(z: C64) -> Self {
        PbComplex { re: z.re, im: z.im }
    }
}

impl From<PbComplex> for C64 {
    fn from(z: PbComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NoConvergence = 4,
    Overflow = 5,
    Panic = 6,
}

impl From<&Error> for PbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InsufficientCoefficients { .. } => PbStatus::InvalidArgument,
            Error::Pole { .. }
            | Error::Domain { .. }
            | Error::BranchCut { .. }
            | Error::ZeroArgument { .. }
            | Error::Sector { .. }
            | Error::PathThroughOrigin => PbStatus::Domain,
            Error::NoConvergence { .. } | Error::Quadrature(_) | Error::Ode(_) | Error::Seeding { .. } => {
                PbStatus::NoConvergence
            }
            Error::Overflow { .. } | Error::SmallDenominator(_) => PbStatus::Overflow,
        }
    }
}

/// A function on the Riemann surface of log ζ satisfying a monodromic relation.
pub struct PbEvaluator {
    inner: Box<dyn BaseEvaluator>,
}

/// Coefficients A_n of the logarithmic expansion of the Bessel dual at t = −2.
pub struct PbExpansion {
    inner: LogExpansion<BesselDual>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), PbStatus>) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PbStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside pbessel".into());
            PbStatus::Panic
        }
    }
}

fn fail(e: Error) -> PbStatus {
    let s = PbStatus::from(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> PbStatus {
    set_error(format!("null pointer: {what}"));
    PbStatus::NullPointer
}

fn invalid(msg: &str) -> PbStatus {
    set_error(msg.to_string());
    PbStatus::InvalidArgument
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, PbStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], PbStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn point(rho: f64, theta: f64) -> Result<SheetPoint, PbStatus> {
    if !(rho > 0.0 && rho.is_finite() && theta.is_finite()) {
        return Err(invalid("sheet point needs finite rho > 0 and finite theta"));
    }
    Ok(SheetPoint { rho, theta })
}

fn pbde(a: f64, coeffs: &[PbComplex]) -> Result<PBDECoefficients, PbStatus> {
    PBDECoefficients::new(a, coeffs.iter().map(|&c| c.into()).collect()).map_err(fail)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pb_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn pb_status_string(status: PbStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        PbStatus::Ok => b"ok\0",
        PbStatus::NullPointer => b"null pointer\0",
        PbStatus::InvalidArgument => b"invalid argument\0",
        PbStatus::Domain => b"argument outside domain\0",
        PbStatus::NoConvergence => b"no convergence\0",
        PbStatus::Overflow => b"overflow\0",
        PbStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// e^ζ √(2ζ/π) K_ν(ζ), with a = 2 and T = 2i cos νπ.
///
/// # Safety
/// `handle` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_evaluator_bessel(nu: f64, handle: *mut *mut PbEvaluator) -> PbStatus {
    guard(|| {
        let h = out(handle, "handle")?;
        if !nu.is_finite() {
            return Err(invalid("nu must be finite"));
        }
        *h = Box::into_raw(Box::new(PbEvaluator {
            inner: Box::new(BesselP { nu }),
        }));
        Ok(())
    })
}

/// Recessive solution P of the perturbed equation with coefficients
/// a₀, a₁, …, continued across sheets with multiplier `t`.
///
/// # Safety
/// `coeffs` must point to `len` values; `handle` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_evaluator_pbde(
    a: f64,
    coeffs: *const PbComplex,
    len: usize,
    t: PbComplex,
    handle: *mut *mut PbEvaluator,
) -> PbStatus {
    guard(|| {
        let h = out(handle, "handle")?;
        let co = pbde(a, slice(coeffs, len, "coeffs")?)?;
        let p = recessive_p_evaluator(&co, &PbdeConfig::default())
            .map_err(fail)?
            .with_t(t.into());
        *h = Box::into_raw(Box::new(PbEvaluator { inner: Box::new(p) }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from a `pb_evaluator_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn pb_evaluator_free(handle: *mut PbEvaluator) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// The pair (a, T) of the relation the evaluator continues with.
///
/// # Safety
/// `handle` must be a live evaluator; `a` and `t` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_evaluator_params(
    handle: *const PbEvaluator,
    a: *mut f64,
    t: *mut PbComplex,
) -> PbStatus {
    guard(|| {
        let e = handle.as_ref().ok_or_else(|| null("handle"))?;
        let (a, t) = (out(a, "a")?, out(t, "t")?);
        let p = e.inner.params();
        *a = p.a;
        *t = p.t.into();
        Ok(())
    })
}

/// Value at ζ = rho·e^{i theta} on any sheet.
///
/// # Safety
/// `handle` must be a live evaluator; `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_evaluator_eval(
    handle: *const PbEvaluator,
    rho: f64,
    theta: f64,
    value: *mut PbComplex,
) -> PbStatus {
    guard(|| {
        let e = handle.as_ref().ok_or_else(|| null("handle"))?;
        let v = out(value, "value")?;
        *v = continue_to_sheet(e.inner.as_ref(), point(rho, theta)?).map_err(fail)?.into();
        Ok(())
    })
}

/// |P(ζe^{iπ}) − P(ζe^{−iπ}) − T e^{−aζ} P(ζ)|.
///
/// # Safety
/// `handle` must be a live evaluator; `residual` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_evaluator_residual(
    handle: *const PbEvaluator,
    rho: f64,
    theta: f64,
    residual: *mut f64,
) -> PbStatus {
    guard(|| {
        let e = handle.as_ref().ok_or_else(|| null("handle"))?;
        let r = out(residual, "residual")?;
        *r = monodromy_residual(e.inner.as_ref(), point(rho, theta)?).map_err(fail)?;
        Ok(())
    })
}

/// Stokes multiplier of the perturbed equation from ODE integration at the
/// given real sample points; `dispersion` is the spread across samples.
///
/// # Safety
/// `coeffs` and `samples` must point to `len` and `n_samples` values;
/// `t` and `dispersion` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_estimate_t(
    a: f64,
    coeffs: *const PbComplex,
    len: usize,
    samples: *const f64,
    n_samples: usize,
    t: *mut PbComplex,
    dispersion: *mut f64,
) -> PbStatus {
    guard(|| {
        let co = pbde(a, slice(coeffs, len, "coeffs")?)?;
        let s = slice(samples, n_samples, "samples")?;
        let (t, d) = (out(t, "t")?, out(dispersion, "dispersion")?);
        let est = estimate_t(&co, s, &PbdeConfig::default()).map_err(fail)?;
        *t = est.mean.into();
        *d = est.dispersion;
        Ok(())
    })
}

/// Coefficients (S_k, T_k) expressing P on the k-th half-turn sheet through
/// P(ζe^{−iπ}) and P(ζ), exponential factors split off.
///
/// # Safety
/// `s` and `t_k` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_st_coefficients(
    a: f64,
    t: PbComplex,
    k: i64,
    s: *mut PbComplex,
    t_k: *mut PbComplex,
) -> PbStatus {
    guard(|| {
        let (s, t_k) = (out(s, "s")?, out(t_k, "t_k")?);
        let params = MonodromyParams::new(a, t.into()).map_err(fail)?;
        let half = (k.unsigned_abs() as usize).div_ceil(2) + 1;
        let seq = st_sequence(&params, half).map_err(fail)?;
        let (sv, tv) = seq.get(k).ok_or_else(|| invalid("k out of range"))?;
        *s = sv.into();
        *t_k = tv.into();
        Ok(())
    })
}

/// A_0..A_{n_max} for the Bessel dual, with splitting radius r ∈ (0, a].
///
/// # Safety
/// `handle` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_expansion_bessel(
    nu: f64,
    n_max: usize,
    r: f64,
    handle: *mut *mut PbExpansion,
) -> PbStatus {
    guard(|| {
        let h = out(handle, "handle")?;
        if !nu.is_finite() {
            return Err(invalid("nu must be finite"));
        }
        let cfg = QuadratureConfig::new(1e-13, 1e-15, 4000).map_err(fail)?;
        let series = AsymptoticSeries::bessel(nu, 2 * n_max.max(40));
        let exp = log_expansion(&BesselP { nu }, BesselDual::new(nu), &series, n_max, r, &cfg).map_err(fail)?;
        *h = Box::into_raw(Box::new(PbExpansion { inner: exp }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from `pb_expansion_bessel`, or be null.
#[no_mangle]
pub unsafe extern "C" fn pb_expansion_free(handle: *mut PbExpansion) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of stored coefficients (n_max + 1).
///
/// # Safety
/// `handle` must be a live expansion or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn pb_expansion_len(handle: *const PbExpansion) -> usize {
    handle.as_ref().map_or(0, |e| e.inner.coeffs.len())
}

/// # Safety
/// `handle` must be a live expansion; `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_expansion_coeff(handle: *const PbExpansion, n: usize, value: *mut PbComplex) -> PbStatus {
    guard(|| {
        let e = handle.as_ref().ok_or_else(|| null("handle"))?;
        let v = out(value, "value")?;
        *v = (*e.inner.coeffs.get(n).ok_or_else(|| invalid("n beyond n_max"))?).into();
        Ok(())
    })
}

/// The expansion evaluated at t = −a + rho·e^{i theta} on the sheet given
/// by theta; rho must stay below a.
///
/// # Safety
/// `handle` must be a live expansion; `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pb_expansion_eval(
    handle: *const PbExpansion,
    rho: f64,
    theta: f64,
    value: *mut PbComplex,
) -> PbStatus {
    guard(|| {
        let e = handle.as_ref().ok_or_else(|| null("handle"))?;
        let v = out(value, "value")?;
        *v = eval_log_expansion_at(&e.inner, point(rho, theta)?).map_err(fail)?.into();
        Ok(())
    })
}
