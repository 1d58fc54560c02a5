//! C interface to the hankellab kernels.
//!
//! Symbols cross the boundary as opaque [`HlSymbol`] handles. Every fallible
//! call returns an [`HlStatus`]; on failure a message is available from
//! [`hl_last_error_message`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hankellab::coefficients::{FracOrder, OperatorSymbol};
use hankellab::counterexamples::{dp1_section_norms, Dp1Config};
use hankellab::error::Error;
use hankellab::functionals::{gram_embedding_value, norm_chain};
use hankellab::hankel::{adjoint_residual, leibniz_residual};
use hankellab::linalg::DenseMatrix;
use hankellab::spaces::{bloch_norm, BlochGrid};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    InvalidArgument = 3,
    OutsideDisc = 4,
    Format = 5,
    Io = 6,
    ZeroBlochNorm = 7,
    NotHermitian = 8,
    InsufficientNodes = 9,
    Panic = 10,
}

/// Opaque operator-valued polynomial.
pub struct HlSymbol {
    inner: OperatorSymbol,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HlStatus {
    match e {
        Error::DimensionMismatch { .. } => HlStatus::DimensionMismatch,
        Error::InvalidArgument(_) => HlStatus::InvalidArgument,
        Error::OutsideDisc { .. } => HlStatus::OutsideDisc,
        Error::InsufficientNodes { .. } => HlStatus::InsufficientNodes,
        Error::NotHermitian(_) => HlStatus::NotHermitian,
        Error::ZeroBlochNorm => HlStatus::ZeroBlochNorm,
        Error::Format(_) => HlStatus::Format,
        Error::Io(_) => HlStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), HlStatusError>) -> HlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err(HlStatusError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".into());
            set_error(msg);
            HlStatus::Panic
        }
    }
}

struct HlStatusError(HlStatus, String);

impl From<Error> for HlStatusError {
    fn from(e: Error) -> Self {
        HlStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> HlStatusError {
    HlStatusError(HlStatus::NullPointer, format!("{what} is null"))
}

fn symbol_ref<'a>(s: *const HlSymbol) -> Result<&'a OperatorSymbol, HlStatusError> {
    // SAFETY: the caller passes a handle obtained from this library or null.
    unsafe { s.as_ref() }.map(|h| &h.inner).ok_or_else(|| null("symbol"))
}

fn write_out<T>(out: *mut T, v: T) -> Result<(), HlStatusError> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null, and the caller guarantees it points to writable storage.
    unsafe { out.write(v) };
    Ok(())
}

fn order(alpha: f64) -> Result<FracOrder, HlStatusError> {
    Ok(FracOrder::new(alpha)?)
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a symbol from `(degree+1)·dim·dim` complex coefficients stored as
/// interleaved `(re, im)` pairs, coefficient-major then row-major.
///
/// # Safety
/// `coeffs` must point to `2·(degree+1)·dim·dim` readable doubles and `out`
/// to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hl_symbol_new(
    dim: usize,
    degree: usize,
    coeffs: *const f64,
    out: *mut *mut HlSymbol,
) -> HlStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coefficient array"));
        }
        let block = dim
            .checked_mul(dim)
            .ok_or_else(|| HlStatusError(HlStatus::InvalidArgument, "dimension overflows".into()))?;
        let len = degree
            .checked_add(1)
            .and_then(|n| n.checked_mul(block))
            .and_then(|n| n.checked_mul(2))
            .ok_or_else(|| HlStatusError(HlStatus::InvalidArgument, "size overflows".into()))?;
        // SAFETY: the caller guarantees `len` readable doubles.
        let data = unsafe { std::slice::from_raw_parts(coeffs, len) };
        let mats = data
            .chunks_exact(2 * block.max(1))
            .take(degree + 1)
            .map(|c| {
                let entries = c.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
                DenseMatrix::from_vec(dim, dim, entries)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let inner = OperatorSymbol::new(dim, mats)?;
        write_out(out, Box::into_raw(Box::new(HlSymbol { inner })))
    })
}

/// Parses a symbol from its JSON file format.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_symbol_from_json(json: *const c_char, out: *mut *mut HlSymbol) -> HlStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        // SAFETY: caller guarantees a nul-terminated string.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| HlStatusError(HlStatus::Format, e.to_string()))?;
        let inner = OperatorSymbol::from_json(text)?;
        write_out(out, Box::into_raw(Box::new(HlSymbol { inner })))
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `symbol` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hl_symbol_free(symbol: *mut HlSymbol) {
    if !symbol.is_null() {
        // SAFETY: ownership returns to Rust exactly once.
        drop(unsafe { Box::from_raw(symbol) });
    }
}

/// # Safety
/// `symbol` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn hl_symbol_dim(symbol: *const HlSymbol) -> usize {
    symbol_ref(symbol).map_or(0, OperatorSymbol::dim)
}

/// # Safety
/// `symbol` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn hl_symbol_degree(symbol: *const HlSymbol) -> usize {
    symbol_ref(symbol).map_or(0, OperatorSymbol::degree)
}

/// Writes the six chain values at truncation `n` into `out_values[0..6]`.
///
/// # Safety
/// `symbol` must be live; `out_values` must hold six doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_norm_chain(
    symbol: *const HlSymbol,
    alpha: f64,
    n: usize,
    out_values: *mut f64,
) -> HlStatus {
    guard(|| {
        let phi = symbol_ref(symbol)?;
        if out_values.is_null() {
            return Err(null("output array"));
        }
        let r = norm_chain(phi, order(alpha)?, n)?;
        // SAFETY: caller provides room for six doubles.
        unsafe { ptr::copy_nonoverlapping(r.values.as_ptr(), out_values, 6) };
        Ok(())
    })
}

/// Anti-analytic Gram supremum over test functions of degree `<= n`.
///
/// # Safety
/// `symbol` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_gram_embedding(symbol: *const HlSymbol, n: usize, out: *mut f64) -> HlStatus {
    guard(|| write_out(out, gram_embedding_value(symbol_ref(symbol)?, n).value))
}

/// # Safety
/// `symbol` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_adjoint_residual(symbol: *const HlSymbol, alpha: f64, n: usize, out: *mut f64) -> HlStatus {
    guard(|| write_out(out, adjoint_residual(symbol_ref(symbol)?, order(alpha)?, n)))
}

/// # Safety
/// `symbol` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_leibniz_residual(symbol: *const HlSymbol, n: usize, out: *mut f64) -> HlStatus {
    guard(|| write_out(out, leibniz_residual(symbol_ref(symbol)?, n)))
}

/// # Safety
/// `symbol` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_bloch_norm(symbol: *const HlSymbol, out: *mut f64) -> HlStatus {
    guard(|| write_out(out, bloch_norm(symbol_ref(symbol)?, BlochGrid::default()).value))
}

/// Largest singular values `σ_max(D^α X_N)` and `σ_max(X_N D^α)` for the
/// default coefficient rule.
///
/// # Safety
/// `left` and `right` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_dp1_section_norms(alpha: f64, n: usize, left: *mut f64, right: *mut f64) -> HlStatus {
    guard(|| {
        if left.is_null() || right.is_null() {
            return Err(null("output pointer"));
        }
        let cfg = Dp1Config::new(order(alpha)?, n)?;
        let row = &dp1_section_norms(&cfg, &[n])[0];
        write_out(left, row.left)?;
        write_out(right, row.right)
    })
}
