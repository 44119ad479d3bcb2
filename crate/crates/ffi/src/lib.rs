//! C ABI for the symsep library.
//!
//! Conventions:
//! - Every function returns a [`SymsepStatus`] and writes results through
//!   out-pointers; `SYMSEP_STATUS_OK` (0) means success.
//! - States and density matrices are opaque handles created and freed by
//!   this library; pass them back only to these functions.
//! - On any failure a thread-local message is set; fetch it with
//!   [`symsep_last_error_message`] (valid until the next failing call on
//!   the same thread).
//!
//! The matching header is checked in at `include/symsep.h` and can be
//! regenerated with `cargo build -p symsep-ffi --features generate-header`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use symsep_core::entanglement as ent;
use symsep_core::linalg::{DensityMatrix, LogBase, PureState};
use symsep_core::states::{
    phi_state, random_symmetric_state, reduce_phi_two_sites, reduce_two_sites, rho_bar,
    HaarSampler, SymmetricState,
};
use symsep_core::symspace::dim_sym_u128;
use symsep_core::symtest::symmetry_test;
use symsep_core::Error;

/// Result codes of every FFI call.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SymsepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeExceeded = 3,
    Overflow = 4,
    NoConvergence = 5,
    InternalPanic = 6,
}

/// Opaque handle to a symmetric-subspace pure state.
pub struct SymsepState(SymmetricState);

/// Opaque handle to a density matrix.
pub struct SymsepDensityMatrix(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&ch| ch != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> SymsepStatus {
    match err {
        Error::Argument(_) => SymsepStatus::InvalidArgument,
        Error::Size { .. } => SymsepStatus::SizeExceeded,
        Error::Overflow(_) => SymsepStatus::Overflow,
        Error::Convergence { .. } => SymsepStatus::NoConvergence,
    }
}

fn run(body: impl FnOnce() -> Result<(), (SymsepStatus, String)>) -> SymsepStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SymsepStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SymsepStatus::InternalPanic
        }
    }
}

fn fail(err: Error) -> (SymsepStatus, String) {
    (status_of(&err), err.to_string())
}

fn null_fail(what: &str) -> (SymsepStatus, String) {
    (SymsepStatus::NullPointer, format!("{what} is null"))
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn symsep_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn symsep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Dimension of the symmetric subspace of m sites of local dimension d.
/// Fails with `SYMSEP_STATUS_OVERFLOW` when the count does not fit u64.
///
/// # Safety
/// `out` must point to writable memory for one u64.
#[no_mangle]
pub unsafe extern "C" fn symsep_dim_sym(d: u64, m: u64, out: *mut u64) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let value = dim_sym_u128(d as u128, m as usize).map_err(fail)?;
        let value: u64 = value.try_into().map_err(|_| {
            (
                SymsepStatus::Overflow,
                format!("dim_sym({d}, {m}) does not fit u64"),
            )
        })?;
        unsafe { *out = value };
        Ok(())
    })
}

/// Exact floor on the ensemble-mean top Schmidt weight of a two-site
/// reduction: dim_sym(2^n, m-2)/dim_sym(2^n, m).
///
/// # Safety
/// `out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn symsep_schmidt_weight_floor(
    n: u32,
    m: u64,
    out: *mut f64,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let value = ent::schmidt_weight_floor(n, m as usize).map_err(fail)?;
        unsafe { *out = value };
        Ok(())
    })
}

/// sqrt(2 * eof_nats), the Pinsker-type distance bound.
///
/// # Safety
/// `out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn symsep_pinsker_upper(eof_nats: f64, out: *mut f64) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let value = ent::pinsker_upper(eof_nats).map_err(fail)?;
        unsafe { *out = value };
        Ok(())
    })
}

/// Draw a uniformly random symmetric state of m sites of n qubits each
/// from RNG stream (seed, stream). Free with [`symsep_state_free`].
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn symsep_random_symmetric_state(
    seed: u64,
    stream: u64,
    n: u32,
    m: u64,
    out: *mut *mut SymsepState,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let mut sampler = HaarSampler::substream(seed, stream);
        let state = random_symmetric_state(&mut sampler, n, m as usize).map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(SymsepState(state))) };
        Ok(())
    })
}

/// Build the Dicke-type basis state with the given occupation vector
/// (length 2^n, entries summing to m). Free with [`symsep_state_free`].
///
/// # Safety
/// `occupation` must point to `occupation_len` readable u32 values and
/// `out` to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn symsep_dicke_state(
    n: u32,
    m: u64,
    occupation: *const u32,
    occupation_len: usize,
    out: *mut *mut SymsepState,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        if occupation.is_null() {
            return Err(null_fail("occupation"));
        }
        let occ = unsafe { std::slice::from_raw_parts(occupation, occupation_len) };
        let state = SymmetricState::dicke(n, m as usize, occ).map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(SymsepState(state))) };
        Ok(())
    })
}

/// # Safety
/// `state` must be a pointer from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn symsep_state_free(state: *mut SymsepState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Two-site reduction of a symmetric state (combinatorial fast path).
/// Free the result with [`symsep_dm_free`].
///
/// # Safety
/// `state` must be a live handle from this library; `out` must point to
/// writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn symsep_reduce_two_sites(
    state: *const SymsepState,
    out: *mut *mut SymsepDensityMatrix,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let Some(state) = (unsafe { state.as_ref() }) else {
            return Err(null_fail("state"));
        };
        let red = reduce_two_sites(&state.0).map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(SymsepDensityMatrix(red.rho))) };
        Ok(())
    })
}

/// First-pair reduction of the symmetric maximally entangled state on
/// m = 2k sites of n qubits each, equal to
/// rho_bar + (2/m)(|Phi+><Phi+| - rho_bar).
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn symsep_phi_reduced(
    n: u32,
    k: u64,
    out: *mut *mut SymsepDensityMatrix,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let phi = phi_state(n, k as usize).map_err(fail)?;
        let red = reduce_phi_two_sites(&phi).map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(SymsepDensityMatrix(red.rho))) };
        Ok(())
    })
}

/// The isotropic twirl of |00><00| on C^d (x) C^d.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn symsep_rho_bar(d: u64, out: *mut *mut SymsepDensityMatrix) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let bar = rho_bar(d as usize).map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(SymsepDensityMatrix(bar))) };
        Ok(())
    })
}

/// # Safety
/// `dm` must be a pointer from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn symsep_dm_free(dm: *mut SymsepDensityMatrix) {
    if !dm.is_null() {
        drop(unsafe { Box::from_raw(dm) });
    }
}

/// Total Hilbert-space dimension of a density matrix handle.
///
/// # Safety
/// `dm` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_dm_dim(
    dm: *const SymsepDensityMatrix,
    out: *mut u64,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let Some(dm) = (unsafe { dm.as_ref() }) else {
            return Err(null_fail("dm"));
        };
        unsafe { *out = dm.0.dim_total() as u64 };
        Ok(())
    })
}

/// Read entry (i, j) of a density matrix.
///
/// # Safety
/// `dm` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_dm_entry(
    dm: *const SymsepDensityMatrix,
    i: u64,
    j: u64,
    re: *mut f64,
    im: *mut f64,
) -> SymsepStatus {
    run(|| {
        if re.is_null() || im.is_null() {
            return Err(null_fail("re/im"));
        }
        let Some(dm) = (unsafe { dm.as_ref() }) else {
            return Err(null_fail("dm"));
        };
        let total = dm.0.dim_total() as u64;
        if i >= total || j >= total {
            return Err((
                SymsepStatus::InvalidArgument,
                format!("entry ({i}, {j}) out of range for dimension {total}"),
            ));
        }
        let z = dm.0.matrix().get(i as usize, j as usize);
        unsafe {
            *re = z.re;
            *im = z.im;
        }
        Ok(())
    })
}

/// Exact two-qubit entanglement of formation; `bits` selects base 2
/// instead of nats.
///
/// # Safety
/// `dm` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_eof_two_qubit(
    dm: *const SymsepDensityMatrix,
    bits: bool,
    out: *mut f64,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let Some(dm) = (unsafe { dm.as_ref() }) else {
            return Err(null_fail("dm"));
        };
        let base = if bits { LogBase::Two } else { LogBase::Nat };
        let value = ent::eof_two_qubit(&dm.0, base).map_err(fail)?;
        unsafe { *out = value };
        Ok(())
    })
}

/// Negativity across the cut after `cut` subsystems.
///
/// # Safety
/// `dm` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_negativity(
    dm: *const SymsepDensityMatrix,
    cut: u64,
    out: *mut f64,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let Some(dm) = (unsafe { dm.as_ref() }) else {
            return Err(null_fail("dm"));
        };
        let value = ent::negativity(&dm.0, cut as usize).map_err(fail)?;
        unsafe { *out = value };
        Ok(())
    })
}

/// PPT flag across the cut after `cut` subsystems.
///
/// # Safety
/// `dm` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_is_ppt(
    dm: *const SymsepDensityMatrix,
    cut: u64,
    out: *mut bool,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        let Some(dm) = (unsafe { dm.as_ref() }) else {
            return Err(null_fail("dm"));
        };
        let value = ent::is_ppt(&dm.0, cut as usize).map_err(fail)?;
        unsafe { *out = value };
        Ok(())
    })
}

/// Trace-norm distance to the PPT set across the cut (equals the
/// separable distance for two qubits). Writes the value, the solver's
/// stationarity gap, and the iteration count.
///
/// # Safety
/// `dm` must be a live handle; `value`, `gap` and `iterations` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_sep_distance(
    dm: *const SymsepDensityMatrix,
    cut: u64,
    tol: f64,
    value: *mut f64,
    gap: *mut f64,
    iterations: *mut u64,
) -> SymsepStatus {
    run(|| {
        if value.is_null() || gap.is_null() || iterations.is_null() {
            return Err(null_fail("value/gap/iterations"));
        }
        let Some(dm) = (unsafe { dm.as_ref() }) else {
            return Err(null_fail("dm"));
        };
        let sol = ent::sep_distance(&dm.0, cut as usize, tol).map_err(fail)?;
        unsafe {
            *value = sol.value;
            *gap = sol.gap;
            *iterations = sol.iterations as u64;
        }
        Ok(())
    })
}

/// Acceptance probability of the symmetrization test on a raw amplitude
/// vector over `num_sites` sites whose dimensions are in `dims`.
///
/// # Safety
/// `amps_re` and `amps_im` must point to `len` readable doubles, `dims`
/// to `num_sites` readable u64 values, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_symmetry_test_probability(
    amps_re: *const f64,
    amps_im: *const f64,
    len: usize,
    dims: *const u64,
    num_sites: usize,
    out: *mut f64,
) -> SymsepStatus {
    run(|| {
        if out.is_null() {
            return Err(null_fail("out"));
        }
        if amps_re.is_null() || amps_im.is_null() || dims.is_null() {
            return Err(null_fail("amps/dims"));
        }
        let re = unsafe { std::slice::from_raw_parts(amps_re, len) };
        let im = unsafe { std::slice::from_raw_parts(amps_im, len) };
        let dims = unsafe { std::slice::from_raw_parts(dims, num_sites) };
        let amps: Vec<Complex64> = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let dims: Vec<usize> = dims.iter().map(|&d| d as usize).collect();
        let psi = PureState::new(amps, dims).map_err(fail)?;
        let outcome = symmetry_test(&psi).map_err(fail)?;
        unsafe { *out = outcome.accept_probability };
        Ok(())
    })
}
