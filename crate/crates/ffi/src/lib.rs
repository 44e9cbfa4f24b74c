//! C ABI over `coherence_lab`.
//!
//! States are opaque `ClabState` handles created by the constructor
//! functions and released with `clab_state_free`. Every fallible call
//! returns a `ClabStatus`; on failure `clab_last_error_message` describes
//! the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use coherence_lab::bell::{chsh_maximize, horodecki_max, ChshStrategy};
use coherence_lab::fock::{fock_state, glauber_cs, split_fock, SplitSpec};
use coherence_lab::qcore::StateVector;
use coherence_lab::spin::{basis_state, spin_cs_zeta, split_spin};
use coherence_lab::splitting::factorization_report;
use coherence_lab::{Error, SpinJ};
use num_complex::Complex64;

/// Opaque state handle.
pub struct ClabState {
    inner: StateVector,
}

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    NumericalFailure = 4,
    Panic = 5,
}

/// Strategy selector for `clab_chsh_maximize`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClabChshStrategy {
    AnalyticQubit = 0,
    MultistartLocalSearch = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

enum Failure {
    Status(ClabStatus, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ClabStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ClabStatus::Ok,
        Ok(Err(Failure::Status(code, msg))) => {
            set_error(msg);
            code
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            if e.is_validation() {
                ClabStatus::InvalidArgument
            } else {
                ClabStatus::NumericalFailure
            }
        }
        Err(_) => {
            set_error("internal panic");
            ClabStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(ClabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn state_ref<'a>(state: *const ClabState) -> Result<&'a StateVector, Failure> {
    // SAFETY: caller passes a handle from this library or null.
    unsafe { state.as_ref() }.map(|s| &s.inner).ok_or_else(|| null("state"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null and, per the contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn emit_state(out: *mut *mut ClabState, state: StateVector) -> Result<(), Failure> {
    let handle = Box::into_raw(Box::new(ClabState { inner: state }));
    if out.is_null() {
        // SAFETY: just allocated above.
        drop(unsafe { Box::from_raw(handle) });
        return Err(null("output pointer"));
    }
    // SAFETY: checked non-null.
    unsafe { out.write(handle) };
    Ok(())
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn clab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn clab_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Glauber coherent state `|alpha>` truncated at Fock cutoff `cutoff`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_glauber_cs(alpha_re: f64, alpha_im: f64, cutoff: usize, out: *mut *mut ClabState) -> ClabStatus {
    guard(|| unsafe { emit_state(out, glauber_cs(Complex64::new(alpha_re, alpha_im), cutoff)?) })
}

/// Number state `|n>` with Fock cutoff `cutoff`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_fock_state(n: usize, cutoff: usize, out: *mut *mut ClabState) -> ClabStatus {
    guard(|| unsafe { emit_state(out, fock_state(n, cutoff)?) })
}

/// Spin coherent state `|j, zeta>` with `j = two_j / 2`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_spin_cs(two_j: u32, zeta_re: f64, zeta_im: f64, out: *mut *mut ClabState) -> ClabStatus {
    guard(|| unsafe { emit_state(out, spin_cs_zeta(SpinJ::from_twice(two_j), Complex64::new(zeta_re, zeta_im))?) })
}

/// Spin basis state `|j, m>` with `j = two_j / 2`, `m = two_m / 2`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_spin_basis(two_j: u32, two_m: i32, out: *mut *mut ClabState) -> ClabStatus {
    guard(|| unsafe { emit_state(out, basis_state(SpinJ::from_twice(two_j), two_m)?) })
}

/// Splits a spin state into spins `two_j_b / 2` and `two_j_c / 2`.
///
/// # Safety
/// `state` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_split_spin(
    state: *const ClabState,
    two_j_b: u32,
    two_j_c: u32,
    out: *mut *mut ClabState,
) -> ClabStatus {
    guard(|| unsafe {
        let s = state_ref(state)?;
        emit_state(out, split_spin(s, SpinJ::from_twice(two_j_b), SpinJ::from_twice(two_j_c))?)
    })
}

/// Splits a single-mode Fock state with beamsplitter weights `mu`, `nu`.
///
/// # Safety
/// `state` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_split_fock(
    state: *const ClabState,
    mu_re: f64,
    mu_im: f64,
    nu_re: f64,
    nu_im: f64,
    out: *mut *mut ClabState,
) -> ClabStatus {
    guard(|| unsafe {
        let s = state_ref(state)?;
        let spec = SplitSpec::new(Complex64::new(mu_re, mu_im), Complex64::new(nu_re, nu_im))?;
        emit_state(out, split_fock(s, spec)?)
    })
}

/// Hilbert-space dimension of `state`.
///
/// # Safety
/// `state` must be a live handle; `dim` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn clab_state_dim(state: *const ClabState, dim: *mut usize) -> ClabStatus {
    guard(|| unsafe { write_out(dim, state_ref(state)?.dim()) })
}

/// Copies the amplitudes into `re[0..len]` and `im[0..len]`. Fails with
/// `BufferTooSmall` when `len` is less than the dimension.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must each be valid for
/// `len` writes.
#[no_mangle]
pub unsafe extern "C" fn clab_state_amplitudes(
    state: *const ClabState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> ClabStatus {
    guard(|| unsafe {
        let s = state_ref(state)?;
        if re.is_null() || im.is_null() {
            return Err(null("amplitude buffer"));
        }
        if len < s.dim() {
            return Err(Failure::Status(
                ClabStatus::BufferTooSmall,
                format!("buffer holds {len} values, state needs {}", s.dim()),
            ));
        }
        for (k, z) in s.amps().iter().enumerate() {
            re.add(k).write(z.re);
            im.add(k).write(z.im);
        }
        Ok(())
    })
}

/// Entanglement entropy in bits of a two-factor state.
///
/// # Safety
/// `state` must be a live handle; `bits` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn clab_entanglement_entropy(state: *const ClabState, bits: *mut f64) -> ClabStatus {
    guard(|| unsafe { write_out(bits, factorization_report(state_ref(state)?)?.entropy_bits) })
}

/// Closed-form CHSH maximum of a two-qubit state.
///
/// # Safety
/// `state` must be a live handle; `value` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn clab_horodecki_max(state: *const ClabState, value: *mut f64) -> ClabStatus {
    guard(|| unsafe { write_out(value, horodecki_max(state_ref(state)?)?) })
}

/// Maximizes the CHSH quantity. `n_starts` and `seed` are used by the
/// multistart strategy only; `n_starts = 0` selects the default.
///
/// # Safety
/// `state` must be a live handle; `value` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn clab_chsh_maximize(
    state: *const ClabState,
    strategy: ClabChshStrategy,
    n_starts: usize,
    seed: u64,
    value: *mut f64,
) -> ClabStatus {
    guard(|| unsafe {
        let s = state_ref(state)?;
        let strategy = match strategy {
            ClabChshStrategy::AnalyticQubit => ChshStrategy::AnalyticQubit,
            ClabChshStrategy::MultistartLocalSearch => ChshStrategy::MultistartLocalSearch {
                n_starts: if n_starts == 0 { ChshStrategy::DEFAULT_STARTS } else { n_starts },
                seed,
                tol: ChshStrategy::DEFAULT_TOL,
            },
        };
        write_out(value, chsh_maximize(s, strategy)?.max_value)
    })
}

/// Serializes `state` as JSON. Release the string with `clab_string_free`.
///
/// # Safety
/// `state` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_state_to_json(state: *const ClabState, out: *mut *mut c_char) -> ClabStatus {
    guard(|| unsafe {
        let text = serde_json::to_string(state_ref(state)?)
            .map_err(|e| Failure::Status(ClabStatus::InvalidArgument, e.to_string()))?;
        let c = CString::new(text).expect("JSON has no NUL bytes");
        write_out(out, c.into_raw())
    })
}

/// Parses a state from JSON as produced by `clab_state_to_json`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writing
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_state_from_json(json: *const c_char, out: *mut *mut ClabState) -> ClabStatus {
    guard(|| unsafe {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure::Status(ClabStatus::InvalidArgument, e.to_string()))?;
        let s: StateVector = serde_json::from_str(text)
            .map_err(|e| Failure::Status(ClabStatus::InvalidArgument, e.to_string()))?;
        emit_state(out, s)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn clab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Releases a state handle. Null is ignored.
///
/// # Safety
/// `state` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn clab_state_free(state: *mut ClabState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}
