//! C ABI over `strassen-core`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every call returns a
//! [`StrassenStatus`]; on anything but `STRASSEN_STATUS_OK` a message is
//! available from [`strassen_last_error`] on the same thread.
//!
//! Strings handed out by this library must be released with
//! [`strassen_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use strassen_core::construction::{derive_decomposition, BilinearDecomposition, PerpPair, Rotation};
use strassen_core::engine::{self, EngineConfig, MatN};
use strassen_core::field::{Field, Scalar};
use strassen_core::format;
use strassen_core::linalg::{ColVec2, Mat2};
use strassen_core::verify::{verify_bilinear_identity, verify_exhaustive_gf, verify_trilinear};
use strassen_core::Error;

/// Result of every call. The first three values agree with the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrassenStatus {
    Ok = 0,
    VerificationFailed = 1,
    InputError = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    InternalError = 5,
}

/// Opaque decomposition handle.
pub struct StrassenDecomposition(BilinearDecomposition);

/// Opaque square matrix handle.
pub struct StrassenMatrix(MatN);

/// Scalar operation counts reported by [`strassen_multiply`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StrassenOpCounts {
    pub scalar_mults: u64,
    pub scalar_adds: u64,
    pub scalar_scalings: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(StrassenStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InternalInvariantViolation(_) => StrassenStatus::InternalError,
            _ => StrassenStatus::InputError,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<StrassenStatus, Fail>) -> StrassenStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside strassen-ffi");
            StrassenStatus::InternalError
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(StrassenStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(StrassenStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn scalars(field: Field, text: &str, len: usize, what: &str) -> Result<Vec<Scalar>, Fail> {
    let v = text
        .split(',')
        .map(|s| Scalar::parse(field, s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != len {
        return Err(Fail(
            StrassenStatus::InputError,
            format!("{what} needs {len} comma-separated scalars"),
        ));
    }
    Ok(v)
}

fn give<T>(out: *mut *mut T, value: T) {
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

fn give_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(StrassenStatus::InternalError, "string contains NUL".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn strassen_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Derives and verifies a decomposition.
///
/// `field` is `"rational"` or `"gf(p)"`. `d` ("a11,a12,a21,a22") and
/// `u` ("u1,u2") may be null to use the defaults.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strassen_decomposition_derive(
    field: *const c_char,
    d: *const c_char,
    u: *const c_char,
    out: *mut *mut StrassenDecomposition,
) -> StrassenStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let field: Field = text(field, "field")?.parse()?;
        field.require_exact()?;
        let rot = match opt_text(d, "d")? {
            None => Rotation::standard(field)?,
            Some(t) => {
                let v = scalars(field, t, 4, "d")?;
                Rotation::new(Mat2::new([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])?)?
            }
        };
        let pp = match opt_text(u, "u")? {
            None => PerpPair::standard(&rot)?,
            Some(t) => {
                let v = scalars(field, t, 2, "u")?;
                PerpPair::new(&rot, ColVec2::new(v[0].clone(), v[1].clone())?)?
            }
        };
        let dec = derive_decomposition(&rot, &pp)?;
        if !verify_bilinear_identity(&dec)?.passed() {
            return Err(Fail(StrassenStatus::VerificationFailed, "derived decomposition failed verification".into()));
        }
        give(out, StrassenDecomposition(dec));
        Ok(StrassenStatus::Ok)
    })
}

/// Parses a JSON decomposition file.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strassen_decomposition_parse(
    json: *const c_char,
    out: *mut *mut StrassenDecomposition,
) -> StrassenStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dec = format::parse(text(json, "json")?)?;
        give(out, StrassenDecomposition(dec));
        Ok(StrassenStatus::Ok)
    })
}

/// Serializes to the JSON file format. Free the result with
/// [`strassen_string_free`].
///
/// # Safety
/// `dec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strassen_decomposition_serialize(
    dec: *const StrassenDecomposition,
    out: *mut *mut c_char,
) -> StrassenStatus {
    guard(|| {
        let dec = handle(dec, "dec")?;
        if out.is_null() {
            return Err(null("out"));
        }
        give_string(out, format::serialize(&dec.0)?)?;
        Ok(StrassenStatus::Ok)
    })
}

/// Number of terms, or 0 for a null handle.
///
/// # Safety
/// `dec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn strassen_decomposition_rank(dec: *const StrassenDecomposition) -> usize {
    dec.as_ref().map_or(0, |d| d.0.rank())
}

/// Runs the unit-pair and trilinear checks, plus the exhaustive check over
/// prime fields when `exhaustive` is set. Returns
/// `STRASSEN_STATUS_VERIFICATION_FAILED` when a check fails; `passed`
/// (optional) receives the verdict either way.
///
/// # Safety
/// `dec` must be a live handle; `passed` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn strassen_decomposition_verify(
    dec: *const StrassenDecomposition,
    exhaustive: bool,
    passed: *mut bool,
) -> StrassenStatus {
    guard(|| {
        let dec = &handle(dec, "dec")?.0;
        let mut reports = vec![verify_bilinear_identity(dec)?, verify_trilinear(dec)?];
        if exhaustive && dec.field().modulus().is_some() {
            reports.push(verify_exhaustive_gf(dec)?);
        }
        let ok = reports.iter().all(|r| r.passed());
        if !passed.is_null() {
            *passed = ok;
        }
        if ok {
            Ok(StrassenStatus::Ok)
        } else {
            let first = reports.iter().find(|r| !r.passed()).unwrap();
            Err(Fail(StrassenStatus::VerificationFailed, first.to_string()))
        }
    })
}

/// # Safety
/// `dec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn strassen_decomposition_free(dec: *mut StrassenDecomposition) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// Parses the text matrix format (`n <dim> field <field>` header, then rows).
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strassen_matrix_parse(
    matrix: *const c_char,
    out: *mut *mut StrassenMatrix,
) -> StrassenStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = format::parse_matrix(text(matrix, "matrix")?)?;
        give(out, StrassenMatrix(m));
        Ok(StrassenStatus::Ok)
    })
}

/// Builds an `n × n` matrix from `n * n` row-major integers.
///
/// # Safety
/// `field` must be NUL-terminated; `entries` must point to `n * n` values;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strassen_matrix_from_i64(
    field: *const c_char,
    n: usize,
    entries: *const i64,
    out: *mut *mut StrassenMatrix,
) -> StrassenStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if entries.is_null() {
            return Err(null("entries"));
        }
        let field: Field = text(field, "field")?.parse()?;
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Fail(StrassenStatus::InputError, "dimension overflows".into()))?;
        let m = MatN::from_i64(field, n, std::slice::from_raw_parts(entries, len))?;
        give(out, StrassenMatrix(m));
        Ok(StrassenStatus::Ok)
    })
}

/// Dimension, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn strassen_matrix_dim(m: *const StrassenMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.n())
}

/// Renders in the text matrix format. Free with [`strassen_string_free`].
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn strassen_matrix_to_string(
    m: *const StrassenMatrix,
    out: *mut *mut c_char,
) -> StrassenStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        if out.is_null() {
            return Err(null("out"));
        }
        give_string(out, format::format_matrix(&m.0))?;
        Ok(StrassenStatus::Ok)
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn strassen_matrix_free(m: *mut StrassenMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Multiplies `a * b` by recursive application of `dec` down to blocks of
/// size `cutoff` (at least 1). `counts` may be null.
///
/// # Safety
/// Handles must be live; `out` must be writable; `counts` null or writable.
#[no_mangle]
pub unsafe extern "C" fn strassen_multiply(
    dec: *const StrassenDecomposition,
    a: *const StrassenMatrix,
    b: *const StrassenMatrix,
    cutoff: usize,
    out: *mut *mut StrassenMatrix,
    counts: *mut StrassenOpCounts,
) -> StrassenStatus {
    guard(|| {
        let dec = handle(dec, "dec")?;
        let a = handle(a, "a")?;
        let b = handle(b, "b")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = EngineConfig::with_cutoff(cutoff)?;
        let (c, counter) = engine::strassen_multiply(&dec.0, &a.0, &b.0, &cfg)?;
        if !counts.is_null() {
            *counts = StrassenOpCounts {
                scalar_mults: counter.scalar_mults,
                scalar_adds: counter.scalar_adds,
                scalar_scalings: counter.scalar_scalings,
            };
        }
        give(out, StrassenMatrix(c));
        Ok(StrassenStatus::Ok)
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn strassen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
