//! C ABI over `switchstab`.
//!
//! Every entry point returns an [`SwsStatus`]; on failure a one-line message is
//! available from [`sws_last_error_message`] on the same thread. Matrices are
//! passed as four doubles in row-major order. Handles are created by
//! `*_new`/`sws_model_*` and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use switchstab::angular::{classify, CaseLabel, Verdict, ZERO_TOL};
use switchstab::certificates::small_beta_certificate;
use switchstab::exact::{beta_c, chi_exact, ExactModel};
use switchstab::pdmp::{simulate_chi, SwitchedSystem};
use switchstab::planar::{bbm_criterion, expm2};
use switchstab::products::{product_lyapunov, ProductVariant};
use switchstab::{Error, Mat2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    NotHurwitz = 3,
    NoHyperbolicSplit = 4,
    NumericalDegeneracy = 5,
    NoTransition = 6,
    NotSpd = 7,
    Quadrature = 8,
    Panic = 99,
}

/// Switched system `(A0, A1, λ, β)`.
pub struct SwsSystem {
    inner: SwitchedSystem,
}

/// Exactly solvable family (rotations or Jordan).
pub struct SwsModel {
    inner: ExactModel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SwsCriterion {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub boundary: bool,
    pub has_window: bool,
    pub window_lo: f64,
    pub window_hi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SwsEstimate {
    pub value: f64,
    pub std_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SwsCertificate {
    pub rho: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    /// `INFINITY` when `beta1_finite` is false.
    pub beta1: f64,
    pub beta1_finite: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwsCase {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
    E = 4,
    F = 5,
    ErgodicNoZeros = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwsVerdict {
    UniqueInvariantMeasure = 0,
    TwoRecurrentClasses = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwsProductVariant {
    Alternating = 0,
    IidHalfsum = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SwsClassification {
    pub label: SwsCase,
    pub verdict: SwsVerdict,
    pub swapped: bool,
    pub degenerate: bool,
    pub has_interval: bool,
    pub interval_start: f64,
    pub interval_end: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SwsStatus {
    match e {
        Error::Domain(_) => SwsStatus::Domain,
        Error::NotHurwitz(_) => SwsStatus::NotHurwitz,
        Error::NoHyperbolicSplit { .. } => SwsStatus::NoHyperbolicSplit,
        Error::NumericalDegeneracy(_) => SwsStatus::NumericalDegeneracy,
        Error::NoTransition(_) => SwsStatus::NoTransition,
        Error::NotSpd(_) => SwsStatus::NotSpd,
        Error::Quadrature(_) => SwsStatus::Quadrature,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SwsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SwsStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(&format!("null pointer: {name}"));
            SwsStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            SwsStatus::Panic
        }
    }
}

unsafe fn read_mat(p: *const f64, name: &'static str) -> Result<Mat2, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    let s = std::slice::from_raw_parts(p, 4);
    Ok(Mat2::new(s[0], s[1], s[2], s[3]))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn in_ref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sws_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `a0`, `a1` point to 4 doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_system_new(
    a0: *const f64,
    a1: *const f64,
    lam: f64,
    beta: f64,
    out: *mut *mut SwsSystem,
) -> SwsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let sys = SwitchedSystem::new(read_mat(a0, "a0")?, read_mat(a1, "a1")?, lam, beta)?;
        *out = Box::into_raw(Box::new(SwsSystem { inner: sys }));
        Ok(())
    })
}

/// # Safety
/// `sys` is null or came from `sws_system_new` and was not freed.
#[no_mangle]
pub unsafe extern "C" fn sws_system_free(sys: *mut SwsSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_model_rotations(a: f64, b: f64, out: *mut *mut SwsModel) -> SwsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let m = ExactModel::rotations(a, b)?;
        *out = Box::into_raw(Box::new(SwsModel { inner: m }));
        Ok(())
    })
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_model_jordan(b: f64, out: *mut *mut SwsModel) -> SwsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let m = ExactModel::jordan(b)?;
        *out = Box::into_raw(Box::new(SwsModel { inner: m }));
        Ok(())
    })
}

/// # Safety
/// `model` is null or came from `sws_model_*` and was not freed.
#[no_mangle]
pub unsafe extern "C" fn sws_model_free(model: *mut SwsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `a0`, `a1` point to 4 doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_criterion(
    a0: *const f64,
    a1: *const f64,
    out: *mut SwsCriterion,
) -> SwsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let r = bbm_criterion(&read_mat(a0, "a0")?, &read_mat(a1, "a1")?)?;
        let (lo, hi) = r.lambda_window.unwrap_or((f64::NAN, f64::NAN));
        *out = SwsCriterion {
            lhs: r.lhs,
            rhs: r.rhs,
            holds: r.holds,
            boundary: r.boundary,
            has_window: r.lambda_window.is_some(),
            window_lo: lo,
            window_hi: hi,
        };
        Ok(())
    })
}

/// `out = exp(t a)`.
///
/// # Safety
/// `a` points to 4 doubles; `out` to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sws_expm2(a: *const f64, t: f64, out: *mut f64) -> SwsStatus {
    guard(|| {
        let m = read_mat(a, "a")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let e = expm2(&m, t);
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&[e.a11, e.a12, e.a21, e.a22]);
        Ok(())
    })
}

/// Monte Carlo Lyapunov exponent from `(theta0, i0)`.
///
/// # Safety
/// `sys` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_chi_mc(
    sys: *const SwsSystem,
    theta0: f64,
    i0: u8,
    horizon: f64,
    replicas: usize,
    seed: u64,
    out: *mut SwsEstimate,
) -> SwsStatus {
    guard(|| {
        let sys = in_ref(sys, "sys")?;
        let out = out_ref(out, "out")?;
        if i0 > 1 {
            return Err(Error::Domain(format!("i0 = {i0} must be 0 or 1")).into());
        }
        let e = simulate_chi(&sys.inner, theta0, i0, horizon, replicas, seed)?;
        *out = SwsEstimate {
            value: e.value,
            std_error: e.std_error,
        };
        Ok(())
    })
}

/// # Safety
/// `model` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_chi_exact(
    model: *const SwsModel,
    beta: f64,
    out: *mut f64,
) -> SwsStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        *out = chi_exact(&m.inner, beta)?;
        Ok(())
    })
}

/// # Safety
/// `model` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_beta_c(model: *const SwsModel, tol: f64, out: *mut f64) -> SwsStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        *out = beta_c(&m.inner, tol)?;
        Ok(())
    })
}

/// # Safety
/// `a0`, `a1` point to 4 doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_certificate(
    a0: *const f64,
    a1: *const f64,
    lam: f64,
    out: *mut SwsCertificate,
) -> SwsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = small_beta_certificate(&read_mat(a0, "a0")?, &read_mat(a1, "a1")?, lam)?;
        *out = SwsCertificate {
            rho: c.rho,
            kappa0: c.kappa0,
            kappa1: c.kappa1,
            beta1: c.beta1,
            beta1_finite: c.beta1.is_finite(),
        };
        Ok(())
    })
}

/// Per-step exponent of the embedded-chain matrix product. `variant` is an
/// [`SwsProductVariant`] value.
///
/// # Safety
/// `sys` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_product_lyapunov(
    sys: *const SwsSystem,
    variant: u32,
    steps: usize,
    replicas: usize,
    seed: u64,
    out: *mut SwsEstimate,
) -> SwsStatus {
    guard(|| {
        let sys = in_ref(sys, "sys")?;
        let out = out_ref(out, "out")?;
        let v = match variant {
            x if x == SwsProductVariant::Alternating as u32 => ProductVariant::Alternating,
            x if x == SwsProductVariant::IidHalfsum as u32 => ProductVariant::IidHalfsum,
            x => return Err(Error::Domain(format!("unknown product variant {x}")).into()),
        };
        let e = product_lyapunov(&sys.inner, v, steps, replicas, seed)?;
        *out = SwsEstimate {
            value: e.value,
            std_error: e.std_error,
        };
        Ok(())
    })
}

/// # Safety
/// `a0`, `a1` point to 4 doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sws_classify(
    a0: *const f64,
    a1: *const f64,
    lam: f64,
    out: *mut SwsClassification,
) -> SwsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let r = classify(&read_mat(a0, "a0")?, &read_mat(a1, "a1")?, lam, ZERO_TOL)?;
        let label = match r.label {
            CaseLabel::A => SwsCase::A,
            CaseLabel::B => SwsCase::B,
            CaseLabel::C => SwsCase::C,
            CaseLabel::D => SwsCase::D,
            CaseLabel::E => SwsCase::E,
            CaseLabel::F => SwsCase::F,
            CaseLabel::ErgodicNoZeros => SwsCase::ErgodicNoZeros,
        };
        let verdict = match r.verdict {
            Verdict::UniqueInvariantMeasure => SwsVerdict::UniqueInvariantMeasure,
            Verdict::TwoRecurrentClasses => SwsVerdict::TwoRecurrentClasses,
        };
        let (s, e) = r
            .invariant_interval
            .map_or((f64::NAN, f64::NAN), |iv| (iv.start, iv.end));
        *out = SwsClassification {
            label,
            verdict,
            swapped: r.swapped,
            degenerate: r.degenerate,
            has_interval: r.invariant_interval.is_some(),
            interval_start: s,
            interval_end: e,
        };
        Ok(())
    })
}
