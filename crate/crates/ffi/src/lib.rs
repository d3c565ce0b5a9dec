//! C ABI over `qpvar`.
//!
//! Spaces and objectives are opaque handles built from the same JSON the CLI
//! reads. Solver results come back as JSON strings owned by the caller and
//! released with [`qpv_string_free`]. Every entry point returns a
//! [`QpvStatus`]; on failure [`qpv_last_error`] describes what went wrong.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qpvar::objective::ObjectiveFile;
use qpvar::space::{validate_space, SpaceFile};
use qpvar::variational::certificate::MapFile;
use qpvar::variational::{
    caristi, equivalence_witness, full_ekeland, takahashi, weak_ekeland, CaristiMap, EquivalenceOutcome,
    FullEkelandParams, TakahashiOutcome,
};
use qpvar::verify::verify;
use qpvar::{Error, FiniteQPSpace, Objective, Rational};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpvStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Unparseable JSON, bad rational, unknown label or wrong shape.
    Malformed = 3,
    /// The matrix violates QM1 or QM2.
    InvalidSpace = 4,
    /// Well-formed input outside a theorem's hypotheses.
    Precondition = 5,
    /// The Takahashi hypothesis fails; the output holds the witness certificate.
    HypothesisViolated = 6,
    /// A certificate did not re-verify; the output holds the report.
    VerifyFailed = 7,
    /// Internal contract broken. Always a bug.
    Fault = 8,
    Panic = 9,
}

/// Opaque space handle.
pub struct QpvSpace(FiniteQPSpace);

/// Opaque objective handle, tied to the space it was built against.
pub struct QpvObjective {
    phi: Objective,
    points: usize,
}

/// Axiom flags of a raw matrix.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QpvValidation {
    pub qm1: bool,
    pub qm2: bool,
    pub qm3: bool,
    pub t1: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(QpvStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidSpace(_) => QpvStatus::InvalidSpace,
            Error::Precondition(_) => QpvStatus::Precondition,
            Error::Fault(_) => QpvStatus::Fault,
            _ => QpvStatus::Malformed,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(QpvStatus::Malformed, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn guard(f: impl FnOnce() -> FfiResult<QpvStatus>) -> QpvStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside qpvar");
            QpvStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid nul-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(QpvStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(QpvStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` is null or points to a live value of type `T`.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Failure(QpvStatus::NullArgument, format!("{what} is null")))
}

fn pair<'a>(space: &'a QpvSpace, phi: &'a QpvObjective) -> FfiResult<(&'a FiniteQPSpace, &'a Objective)> {
    if phi.points != space.0.len() {
        return Err(Failure(QpvStatus::Malformed, "objective was built for a different space".into()));
    }
    Ok((&space.0, &phi.phi))
}

/// # Safety
/// `out` is null or writable.
unsafe fn put_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure(QpvStatus::NullArgument, "output pointer is null".into()));
    }
    let s = serde_json::to_string(value)?;
    *out = CString::new(s).expect("JSON has no nul bytes").into_raw();
    Ok(())
}

/// Builds a space from `{"points": [...], "d": [[...]]}`.
///
/// # Safety
/// `json` is a nul-terminated string and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_space_from_json(json: *const c_char, out: *mut *mut QpvSpace) -> QpvStatus {
    guard(|| {
        let json = text(json, "json")?;
        if out.is_null() {
            return Err(Failure(QpvStatus::NullArgument, "out is null".into()));
        }
        let file: SpaceFile = serde_json::from_str(json)?;
        let space = file.into_space()?;
        *out = Box::into_raw(Box::new(QpvSpace(space)));
        Ok(QpvStatus::Ok)
    })
}

/// # Safety
/// `space` is null or came from [`qpv_space_from_json`] and is not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qpv_space_free(space: *mut QpvSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `space` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qpv_space_len(space: *const QpvSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.len())
}

/// Builds an objective from `{"phi": {label: value}}` against `space`.
///
/// # Safety
/// `space` is a live handle, `json` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_objective_from_json(
    space: *const QpvSpace,
    json: *const c_char,
    out: *mut *mut QpvObjective,
) -> QpvStatus {
    guard(|| {
        let space = handle(space, "space")?;
        let json = text(json, "json")?;
        if out.is_null() {
            return Err(Failure(QpvStatus::NullArgument, "out is null".into()));
        }
        let file: ObjectiveFile = serde_json::from_str(json)?;
        let phi = file.into_objective(&space.0)?;
        *out = Box::into_raw(Box::new(QpvObjective { phi, points: space.0.len() }));
        Ok(QpvStatus::Ok)
    })
}

/// # Safety
/// `phi` is null or came from [`qpv_objective_from_json`] and is not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qpv_objective_free(phi: *mut QpvObjective) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// Axiom flags of a space file whose matrix may be invalid.
///
/// # Safety
/// `json` is a nul-terminated string and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_validate(json: *const c_char, out: *mut QpvValidation) -> QpvStatus {
    guard(|| {
        let json = text(json, "json")?;
        let out = out
            .as_mut()
            .ok_or_else(|| Failure(QpvStatus::NullArgument, "out is null".into()))?;
        let file: SpaceFile = serde_json::from_str(json)?;
        let v = validate_space(&file.d)?;
        *out = QpvValidation { qm1: v.qm1_ok, qm2: v.qm2_ok, qm3: v.qm3_ok, t1: v.t1_ok };
        Ok(QpvStatus::Ok)
    })
}

/// Weak Ekeland certificate as JSON.
///
/// # Safety
/// Handles are live and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_ekeland_weak(
    space: *const QpvSpace,
    phi: *const QpvObjective,
    out: *mut *mut c_char,
) -> QpvStatus {
    guard(|| {
        let (s, f) = pair(handle(space, "space")?, handle(phi, "phi")?)?;
        put_json(out, &weak_ekeland(s, f)?.certificate)?;
        Ok(QpvStatus::Ok)
    })
}

/// Full Ekeland certificate. `eps` and `lambda` are rational strings such
/// as `"3/2"`; `x0` is a point label.
///
/// # Safety
/// Handles are live, strings nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_ekeland_full(
    space: *const QpvSpace,
    phi: *const QpvObjective,
    eps: *const c_char,
    lambda: *const c_char,
    x0: *const c_char,
    out: *mut *mut c_char,
) -> QpvStatus {
    guard(|| {
        let (s, f) = pair(handle(space, "space")?, handle(phi, "phi")?)?;
        let eps: Rational = text(eps, "eps")?.parse().map_err(Error::from)?;
        let lambda: Rational = text(lambda, "lambda")?.parse().map_err(Error::from)?;
        let x0 = s.point(text(x0, "x0")?)?;
        let params = FullEkelandParams::new(eps, lambda, x0)?;
        put_json(out, &full_ekeland(s, f, &params)?.certificate)?;
        Ok(QpvStatus::Ok)
    })
}

/// Takahashi certificate. When the hypothesis fails the status is
/// `HypothesisViolated` and `out` still receives the witness certificate.
///
/// # Safety
/// Handles are live and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_takahashi(
    space: *const QpvSpace,
    phi: *const QpvObjective,
    out: *mut *mut c_char,
) -> QpvStatus {
    guard(|| {
        let (s, f) = pair(handle(space, "space")?, handle(phi, "phi")?)?;
        match takahashi(s, f)? {
            TakahashiOutcome::Minimizer(sol) => {
                put_json(out, &sol.certificate)?;
                Ok(QpvStatus::Ok)
            }
            TakahashiOutcome::HypothesisViolated { witness, certificate } => {
                put_json(out, &certificate)?;
                set_error(&format!("descent hypothesis fails at `{}`", s.label(witness)));
                Ok(QpvStatus::HypothesisViolated)
            }
        }
    })
}

/// Caristi certificate for a map given as `{label: label}` or
/// `{label: [labels]}`.
///
/// # Safety
/// Handles are live, `map_json` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_caristi(
    space: *const QpvSpace,
    phi: *const QpvObjective,
    map_json: *const c_char,
    out: *mut *mut c_char,
) -> QpvStatus {
    guard(|| {
        let (s, f) = pair(handle(space, "space")?, handle(phi, "phi")?)?;
        let file: MapFile = serde_json::from_str(text(map_json, "map_json")?)?;
        let map = CaristiMap::from_file(s, &file)?;
        put_json(out, &caristi(s, f, &map)?.certificate)?;
        Ok(QpvStatus::Ok)
    })
}

/// Equivalence certificate.
///
/// # Safety
/// Handles are live and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_equivalence(
    space: *const QpvSpace,
    phi: *const QpvObjective,
    out: *mut *mut c_char,
) -> QpvStatus {
    guard(|| {
        let (s, f) = pair(handle(space, "space")?, handle(phi, "phi")?)?;
        let cert = match equivalence_witness(s, f)? {
            EquivalenceOutcome::WeakEkeland { certificate, .. }
            | EquivalenceOutcome::CaristiRefutation { certificate, .. } => certificate,
        };
        put_json(out, &cert)?;
        Ok(QpvStatus::Ok)
    })
}

/// Re-checks a certificate. The report goes to `out` in both outcomes; the
/// status is `VerifyFailed` when any claim does not hold.
///
/// # Safety
/// Handles are live, `certificate_json` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_verify(
    space: *const QpvSpace,
    phi: *const QpvObjective,
    certificate_json: *const c_char,
    out: *mut *mut c_char,
) -> QpvStatus {
    guard(|| {
        let (s, f) = pair(handle(space, "space")?, handle(phi, "phi")?)?;
        let cert = serde_json::from_str(text(certificate_json, "certificate_json")?)?;
        let report = verify(&cert, s, f);
        put_json(out, &report)?;
        if report.valid {
            Ok(QpvStatus::Ok)
        } else {
            set_error(&report.failures.join("; "));
            Ok(QpvStatus::VerifyFailed)
        }
    })
}

/// The incompleteness report truncated at `n >= 2` points.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qpv_incomplete_demo(n: usize, out: *mut *mut c_char) -> QpvStatus {
    guard(|| {
        let report = qpvar::incompleteness::demo_report(n)?;
        put_json(out, &report)?;
        if report.passed {
            Ok(QpvStatus::Ok)
        } else {
            set_error("a check of the demo failed");
            Ok(QpvStatus::Fault)
        }
    })
}

/// Releases a string returned through an `out` parameter.
///
/// # Safety
/// `s` is null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qpv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failing call on this thread, or null. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn qpv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
