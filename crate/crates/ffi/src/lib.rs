//! C ABI for the `surprisal` crate.
//!
//! Every function returns a [`SurprisalStatus`]. On failure the message is
//! kept per thread and can be read with [`surprisal_last_error`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use surprisal::lorenz::{approx_transition, exact_transition};
use surprisal::measures::{measures, renyi_entropy, Dichotomy, Spectrum};
use surprisal::spectral::spectrum_from_renyi;
use surprisal::Error;

/// Status codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurprisalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    NotFullRank = 4,
    Numerical = 5,
    Panic = 6,
}

/// Opaque handle to a validated dichotomy.
pub struct SurprisalDichotomy {
    inner: Dichotomy,
}

/// Scalar measures of a dichotomy, in bits.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SurprisalMeasures {
    pub relative_entropy: f64,
    pub variance: f64,
    pub second_moment: f64,
    pub smin: f64,
    pub smax: f64,
}

/// Result of a transition test.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SurprisalVerdict {
    pub feasible: bool,
    pub worst_gap: f64,
    pub witness_x: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SurprisalStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::DimensionCapExceeded { .. } => {
            SurprisalStatus::DimensionMismatch
        }
        Error::ReferenceNotFullRank { .. } => SurprisalStatus::NotFullRank,
        Error::NoConvergence { .. } | Error::ComplexRoots { .. } | Error::RootOutOfRange(_) => {
            SurprisalStatus::Numerical
        }
        _ => SurprisalStatus::InvalidInput,
    }
}

struct Failure(SurprisalStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SurprisalStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SurprisalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SurprisalStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            SurprisalStatus::Panic
        }
    }
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn handle<'a>(ptr: *const SurprisalDichotomy, what: &str) -> Result<&'a Dichotomy, Failure> {
    ptr.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Creates a dichotomy from a state `p` and reference `s`, both of length
/// `len`. A null `s` selects the uniform reference.
///
/// # Safety
/// `p` (and `s` if non-null) must point to `len` readable doubles, and `out`
/// must be writable. The handle must be released with
/// [`surprisal_dichotomy_free`].
#[no_mangle]
pub unsafe extern "C" fn surprisal_dichotomy_new(
    p: *const f64,
    s: *const f64,
    len: usize,
    out: *mut *mut SurprisalDichotomy,
) -> SurprisalStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = Spectrum::new(slice(p, len, "p")?.to_vec())?;
        let inner = if s.is_null() {
            Dichotomy::unital(p)?
        } else {
            Dichotomy::new(p, Spectrum::new(slice(s, len, "s")?.to_vec())?)?
        };
        out.write(Box::into_raw(Box::new(SurprisalDichotomy { inner })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `d` must come from [`surprisal_dichotomy_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn surprisal_dichotomy_free(d: *mut SurprisalDichotomy) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Dimension of a dichotomy, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn surprisal_dichotomy_dim(d: *const SurprisalDichotomy) -> usize {
    d.as_ref().map_or(0, |h| h.inner.dim())
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn surprisal_measures(
    d: *const SurprisalDichotomy,
    out: *mut SurprisalMeasures,
) -> SurprisalStatus {
    guard(|| {
        let m = measures(handle(d, "d")?);
        write(
            out,
            SurprisalMeasures {
                relative_entropy: m.relative_entropy,
                variance: m.variance,
                second_moment: m.second_moment,
                smin: m.smin,
                smax: m.smax,
            },
            "out",
        )
    })
}

/// Decides whether `from` can be mapped exactly onto `to`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn surprisal_exact_transition(
    from: *const SurprisalDichotomy,
    to: *const SurprisalDichotomy,
    out: *mut SurprisalVerdict,
) -> SurprisalStatus {
    guard(|| {
        let v = exact_transition(handle(from, "from")?, handle(to, "to")?);
        write(
            out,
            SurprisalVerdict {
                feasible: v.decision,
                worst_gap: v.worst_gap,
                witness_x: v.witness_x,
            },
            "out",
        )
    })
}

/// Decides whether `from` can reach a state within trace distance `eps`
/// of `to`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn surprisal_approx_transition(
    from: *const SurprisalDichotomy,
    to: *const SurprisalDichotomy,
    eps: f64,
    out: *mut SurprisalVerdict,
) -> SurprisalStatus {
    guard(|| {
        let v = approx_transition(handle(from, "from")?, handle(to, "to")?, eps)?;
        write(
            out,
            SurprisalVerdict {
                feasible: v.decision,
                worst_gap: v.worst_gap,
                witness_x: v.witness_x,
            },
            "out",
        )
    })
}

/// Rényi entropy of order `alpha` of the distribution `p`.
///
/// # Safety
/// `p` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn surprisal_renyi_entropy(
    p: *const f64,
    len: usize,
    alpha: f64,
    out: *mut f64,
) -> SurprisalStatus {
    guard(|| {
        let p = Spectrum::new(slice(p, len, "p")?.to_vec())?;
        write(out, renyi_entropy(&p, alpha)?, "out")
    })
}

/// Recovers a spectrum of dimension `dim` from the Rényi entropies of
/// orders `2..=dim`, written in descending order to `out`.
///
/// # Safety
/// `renyi` must point to `dim - 1` readable doubles and `out` to `dim`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn surprisal_spectrum_from_renyi(
    renyi: *const f64,
    dim: usize,
    out: *mut f64,
) -> SurprisalStatus {
    guard(|| {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim).into());
        }
        let values = slice(renyi, dim - 1, "renyi")?;
        let q = spectrum_from_renyi(values, dim)?;
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, dim).copy_from_slice(q.values());
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string, truncating to `cap` bytes. Returns the length of
/// the full message excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn surprisal_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn surprisal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
