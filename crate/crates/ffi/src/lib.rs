//! C ABI over the core library: opaque handles, status codes and a per-thread error message.
//!
//! Every function returns a [`GueStatus`]; results are written through out-pointers. On failure
//! [`gue_last_error_message`] describes the problem.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gue_crowding::finite_n;
use gue_crowding::montecarlo::TridiagonalSpectrumSampler;
use gue_crowding::painleve::{self, PainleveTable};
use gue_crowding::scaling;
use gue_crowding::Error;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GueStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Eigensolver = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Solved Painlevé table.
pub struct GuePainleveTable {
    inner: PainleveTable,
}

/// Tridiagonal GUE spectrum sampler.
pub struct GueSampler {
    inner: TridiagonalSpectrumSampler,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn status_of(err: &Error) -> GueStatus {
    match err {
        Error::Precondition(_) | Error::OutOfDomain { .. } | Error::EmptySamples => GueStatus::InvalidArgument,
        Error::Eigen(_) => GueStatus::Eigensolver,
        _ => GueStatus::Numerical,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (GueStatus, String)>) -> GueStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GueStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GueStatus::Panic
        }
    }
}

fn lift<T>(r: gue_crowding::Result<T>) -> Result<T, (GueStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GueStatus, String) {
    (GueStatus::NullPointer, format!("{what} is null"))
}

fn size(n: u32) -> usize {
    n as usize
}

/// Message of the last failure on this thread; empty after a success. Valid until the next call.
#[no_mangle]
pub extern "C" fn gue_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gue_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Solve the Painlevé table on the default grid. Free with [`gue_table_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_table_new(out: *mut *mut GuePainleveTable) -> GueStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = lift(PainleveTable::solve_default())?;
        *out = Box::into_raw(Box::new(GuePainleveTable { inner }));
        Ok(())
    })
}

/// Release a table; null is ignored.
///
/// # Safety
/// `table` must come from [`gue_table_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gue_table_free(table: *mut GuePainleveTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

unsafe fn table_eval(
    table: *const GuePainleveTable,
    out: *mut f64,
    f: impl FnOnce(&PainleveTable) -> gue_crowding::Result<f64>,
) -> GueStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lift(f(&t.inner))?;
        Ok(())
    })
}

/// Hastings–McLeod solution q(x) inside the table range.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_table_q(table: *const GuePainleveTable, x: f64, out: *mut f64) -> GueStatus {
    table_eval(table, out, |t| t.q.eval(x))
}

/// Tracy–Widom F₂(x).
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_tracy_widom_f2(table: *const GuePainleveTable, x: f64, out: *mut f64) -> GueStatus {
    table_eval(table, out, |t| {
        if x.is_finite() {
            Ok(painleve::tracy_widom_f2(t, x))
        } else {
            Err(Error::Precondition("x must be finite".into()))
        }
    })
}

/// Edge scaling function of the density below the maximum.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_rho_edge(table: *const GuePainleveTable, r_tilde: f64, out: *mut f64) -> GueStatus {
    table_eval(table, out, |t| scaling::rho_edge_scaling(r_tilde, t))
}

/// Edge scaling function of the first gap.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_p_typ(table: *const GuePainleveTable, r_tilde: f64, out: *mut f64) -> GueStatus {
    table_eval(table, out, |t| scaling::p_typ(r_tilde, t))
}

/// Quartic coefficient of the small-distance expansion.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_a4(table: *const GuePainleveTable, out: *mut f64) -> GueStatus {
    table_eval(table, out, |t| Ok(scaling::a4_integral(t).value))
}

/// Large-distance form of the gap scaling function.
#[no_mangle]
pub extern "C" fn gue_gap_tail_asymptotic(r_tilde: f64) -> f64 {
    scaling::gap_tail_asymptotic(r_tilde)
}

unsafe fn plain_eval(out: *mut f64, f: impl FnOnce() -> gue_crowding::Result<f64>) -> GueStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lift(f())?;
        Ok(())
    })
}

/// Exact finite-N density below the maximum.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_dos_exact(r: f64, n: u32, out: *mut f64) -> GueStatus {
    plain_eval(out, || finite_n::dos_exact(r, size(n)))
}

/// Exact finite-N first-gap density.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_gap_pdf_exact(r: f64, n: u32, out: *mut f64) -> GueStatus {
    plain_eval(out, || finite_n::gap_pdf_exact(r, size(n)))
}

/// Exact distribution function of the largest eigenvalue.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_cdf_lambda_max(y: f64, n: u32, out: *mut f64) -> GueStatus {
    plain_eval(out, || finite_n::cdf_lambda_max(y, size(n)))
}

/// Create a sampler of N×N spectra. Free with [`gue_sampler_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn gue_sampler_new(n: u32, seed: u64, out: *mut *mut GueSampler) -> GueStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = lift(TridiagonalSpectrumSampler::new(size(n), seed))?;
        *out = Box::into_raw(Box::new(GueSampler { inner }));
        Ok(())
    })
}

/// Release a sampler; null is ignored.
///
/// # Safety
/// `sampler` must come from [`gue_sampler_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gue_sampler_free(sampler: *mut GueSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Write the spectrum of draw `index`, descending, into `buffer` of length `len` (at least N).
///
/// # Safety
/// `sampler` must be a live handle and `buffer` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gue_sampler_spectrum(
    sampler: *const GueSampler,
    index: u64,
    buffer: *mut f64,
    len: usize,
) -> GueStatus {
    guard(|| {
        let s = sampler.as_ref().ok_or_else(|| null("sampler"))?;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let n = s.inner.n();
        if len < n {
            return Err((GueStatus::BufferTooSmall, format!("buffer holds {len} values, {n} needed")));
        }
        let spectrum = lift(s.inner.spectrum(index))?;
        std::slice::from_raw_parts_mut(buffer, n).copy_from_slice(&spectrum);
        Ok(())
    })
}
