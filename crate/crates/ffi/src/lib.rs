//! C ABI over `bjorth`.
//!
//! Matrices and algebra elements are opaque handles created by `*_new` or
//! `*_from_json` and released with the matching `*_free`. Every fallible call
//! returns a [`BjStatus`]; on failure a description is available from
//! [`bj_last_error_message`] on the same thread. Complex entries cross the
//! boundary as separate row-major arrays of real and imaginary parts.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use bjorth::bj::{bj_orthogonal_criterion, bj_orthogonal_minimize, BjState};
use bjorth::cstar::{bj_orthogonal_alg, is_smooth, AlgebraElement, AlgebraShape};
use bjorth::io::{parse_algebra, serialize_algebra};
use bjorth::linalg::{spectral_norm, zero_in_numrange, ComplexMatrix, Membership, C64};
use bjorth::tol::{NUMRANGE_GRID, NUMRANGE_REFINE};
use bjorth::BjError;

/// Opaque dense complex matrix.
pub struct BjMatrix {
    inner: ComplexMatrix,
}

/// Opaque element of a direct sum of matrix blocks.
pub struct BjElement {
    inner: AlgebraElement,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BjStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    NonFinite = 4,
    ZeroMatrix = 5,
    Parse = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BjOrthogonality {
    Orthogonal = 0,
    NotOrthogonal = 1,
    Borderline = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BjMethod {
    Criterion = 0,
    Minimize = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BjMembership {
    Contains = 0,
    Excludes = 1,
    Borderline = 2,
}

/// Verdict of an orthogonality query. `margin` is oracle-specific; negative
/// values lean towards non-orthogonality.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BjVerdict {
    pub state: BjOrthogonality,
    pub margin: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(BjStatus, String);

impl From<BjError> for Failure {
    fn from(e: BjError) -> Self {
        let status = match e {
            BjError::Parse(_) => BjStatus::Parse,
            BjError::ShapeMismatch(_) | BjError::NonSquare { .. } | BjError::InvalidShape(_) => BjStatus::ShapeMismatch,
            BjError::NonFinite => BjStatus::NonFinite,
            BjError::ZeroMatrix { .. } | BjError::ZeroElement | BjError::ZeroVector => BjStatus::ZeroMatrix,
            _ => BjStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BjStatus {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(Failure(BjStatus::Internal, format!("internal error: {msg}")))
    });
    match result {
        Ok(()) => {
            set_error(None);
            BjStatus::Ok
        }
        Err(Failure(status, msg)) => {
            set_error(Some(msg));
            status
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BjStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn complex_entries(len: usize, re: *const f64, im: *const f64) -> Result<Vec<C64>, Failure> {
    if re.is_null() {
        return Err(null("re"));
    }
    let re = slice::from_raw_parts(re, len);
    let im = if im.is_null() { None } else { Some(slice::from_raw_parts(im, len)) };
    Ok((0..len).map(|k| C64::new(re[k], im.map_or(0.0, |v| v[k]))).collect())
}

fn verdict(v: bjorth::bj::BjVerdict) -> BjVerdict {
    let state = match v.state {
        BjState::Orthogonal => BjOrthogonality::Orthogonal,
        BjState::NotOrthogonal => BjOrthogonality::NotOrthogonal,
        BjState::Borderline => BjOrthogonality::Borderline,
    };
    BjVerdict { state, margin: v.margin }
}

/// Message describing the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next call into this
/// library on the same thread.
#[no_mangle]
pub extern "C" fn bj_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a `rows x cols` matrix from row-major real and imaginary parts.
/// `im` may be NULL for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `rows * cols` doubles, and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_matrix_new(rows: usize, cols: usize, re: *const f64, im: *const f64, out: *mut *mut BjMatrix) -> BjStatus {
    guard(|| {
        if rows == 0 || cols == 0 {
            return Err(Failure(BjStatus::InvalidArgument, format!("empty {rows}x{cols} matrix")));
        }
        let len = rows.checked_mul(cols).ok_or_else(|| Failure(BjStatus::InvalidArgument, "size overflow".into()))?;
        let m = ComplexMatrix::from_vec(rows, cols, complex_entries(len, re, im)?)?;
        if !m.is_finite() {
            return Err(BjError::NonFinite.into());
        }
        write_out(out, Box::into_raw(Box::new(BjMatrix { inner: m })), "out")
    })
}

/// Releases a matrix. NULL is ignored.
///
/// # Safety
/// `m` must be NULL or a handle from [`bj_matrix_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bj_matrix_free(m: *mut BjMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `rows` and `cols` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bj_matrix_shape(m: *const BjMatrix, rows: *mut usize, cols: *mut usize) -> BjStatus {
    guard(|| {
        let (r, c) = deref(m, "m")?.inner.shape();
        write_out(rows, r, "rows")?;
        write_out(cols, c, "cols")
    })
}

/// Reads entry `(i, j)`, zero-based.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bj_matrix_get(m: *const BjMatrix, i: usize, j: usize, re: *mut f64, im: *mut f64) -> BjStatus {
    guard(|| {
        let m = &deref(m, "m")?.inner;
        if i >= m.rows() || j >= m.cols() {
            return Err(Failure(BjStatus::InvalidArgument, format!("index ({i}, {j}) out of range for {}x{}", m.rows(), m.cols())));
        }
        let z = m[(i, j)];
        write_out(re, z.re, "re")?;
        write_out(im, z.im, "im")
    })
}

/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_spectral_norm(m: *const BjMatrix, out: *mut f64) -> BjStatus {
    guard(|| write_out(out, spectral_norm(&deref(m, "m")?.inner), "out"))
}

/// Decides whether `A ⊥ B` for two matrices of equal shape.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_check(a: *const BjMatrix, b: *const BjMatrix, method: BjMethod, out: *mut BjVerdict) -> BjStatus {
    guard(|| {
        let (a, b) = (&deref(a, "a")?.inner, &deref(b, "b")?.inner);
        let v = match method {
            BjMethod::Criterion => bj_orthogonal_criterion(a, b)?,
            BjMethod::Minimize => bj_orthogonal_minimize(a, b)?,
        };
        write_out(out, verdict(v), "out")
    })
}

/// Whether 0 lies in the numerical range of a square matrix. `margin`
/// receives the signed distance of 0 to the boundary (positive inside).
///
/// # Safety
/// `m` must be a live handle; `membership` and `margin` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bj_zero_in_numrange(m: *const BjMatrix, membership: *mut BjMembership, margin: *mut f64) -> BjStatus {
    guard(|| {
        let v = zero_in_numrange(&deref(m, "m")?.inner, NUMRANGE_GRID, NUMRANGE_REFINE)?;
        let state = match v.contains_zero {
            Membership::Contains => BjMembership::Contains,
            Membership::Excludes => BjMembership::Excludes,
            Membership::Borderline => BjMembership::Borderline,
        };
        write_out(membership, state, "membership")?;
        write_out(margin, v.margin, "margin")
    })
}

/// Creates an element of `M_{n_1} ⊕ ... ⊕ M_{n_l}` with `sizes = [n_1..n_l]`.
/// `re` and `im` hold the blocks' row-major entries back to back; `im` may
/// be NULL.
///
/// # Safety
/// `sizes` must point to `num_blocks` values and `re` (and `im` when
/// non-null) to `sum n_k²` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_element_new(
    num_blocks: usize,
    sizes: *const usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut BjElement,
) -> BjStatus {
    guard(|| {
        if sizes.is_null() {
            return Err(null("sizes"));
        }
        let sizes = slice::from_raw_parts(sizes, num_blocks).to_vec();
        let shape = AlgebraShape::new(sizes.clone())?;
        let total = sizes
            .iter()
            .try_fold(0usize, |acc, &n| n.checked_mul(n).and_then(|sq| acc.checked_add(sq)))
            .ok_or_else(|| Failure(BjStatus::InvalidArgument, "size overflow".into()))?;
        let mut entries = complex_entries(total, re, im)?.into_iter();
        let blocks =
            sizes.iter().map(|&n| ComplexMatrix::from_vec(n, n, entries.by_ref().take(n * n).collect())).collect::<Result<Vec<_>, _>>()?;
        let e = AlgebraElement::new(shape, blocks)?;
        if e.blocks().iter().any(|b| !b.is_finite()) {
            return Err(BjError::NonFinite.into());
        }
        write_out(out, Box::into_raw(Box::new(BjElement { inner: e })), "out")
    })
}

/// Parses the JSON element format used by the command-line tool.
///
/// # Safety
/// `text` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_element_from_json(text: *const c_char, out: *mut *mut BjElement) -> BjStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| Failure(BjStatus::Parse, e.to_string()))?;
        let e = parse_algebra(s)?;
        write_out(out, Box::into_raw(Box::new(BjElement { inner: e })), "out")
    })
}

/// Serializes an element to JSON. Release the string with [`bj_string_free`].
///
/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_element_to_json(e: *const BjElement, out: *mut *mut c_char) -> BjStatus {
    guard(|| {
        let s = CString::new(serialize_algebra(&deref(e, "e")?.inner)).map_err(|e| Failure(BjStatus::Internal, e.to_string()))?;
        write_out(out, s.into_raw(), "out")
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from [`bj_element_to_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bj_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases an element. NULL is ignored.
///
/// # Safety
/// `e` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bj_element_free(e: *mut BjElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_element_norm(e: *const BjElement, out: *mut f64) -> BjStatus {
    guard(|| write_out(out, deref(e, "e")?.inner.norm(), "out"))
}

/// Decides whether `A ⊥ B` in the direct sum.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_check_alg(a: *const BjElement, b: *const BjElement, out: *mut BjVerdict) -> BjStatus {
    guard(|| {
        let v = bj_orthogonal_alg(&deref(a, "a")?.inner, &deref(b, "b")?.inner)?;
        write_out(out, verdict(v), "out")
    })
}

/// Whether a nonzero element is smooth.
///
/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bj_is_smooth(e: *const BjElement, out: *mut bool) -> BjStatus {
    guard(|| write_out(out, is_smooth(&deref(e, "e")?.inner)?.smooth, "out"))
}
