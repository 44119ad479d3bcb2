//! Exercise the C ABI end to end from Rust: handle lifecycle, error
//! codes, and numerical agreement with the core library.

use std::ffi::CStr;
use std::ptr;

use symsep_ffi::*;

#[test]
fn dim_sym_values_and_overflow() {
    let mut out = 0u64;
    assert_eq!(
        unsafe { symsep_dim_sym(2, 10, &mut out) },
        SymsepStatus::Ok
    );
    assert_eq!(out, 11);

    let status = unsafe { symsep_dim_sym(u64::MAX, 40, &mut out) };
    assert_eq!(status, SymsepStatus::Overflow);
    let msg = unsafe { CStr::from_ptr(symsep_last_error_message()) };
    assert!(!msg.to_str().unwrap().is_empty());
}

#[test]
fn phi_reduction_round_trip_matches_closed_form() {
    // reduction handle
    let mut dm: *mut SymsepDensityMatrix = ptr::null_mut();
    assert_eq!(unsafe { symsep_phi_reduced(1, 2, &mut dm) }, SymsepStatus::Ok);
    let mut dim = 0u64;
    assert_eq!(unsafe { symsep_dm_dim(dm, &mut dim) }, SymsepStatus::Ok);
    assert_eq!(dim, 4);

    // compare every entry against the closed form from the core crate
    let closed = symsep_core::states::phi_reduced_closed_form(1, 2).unwrap();
    for i in 0..4u64 {
        for j in 0..4u64 {
            let (mut re, mut im) = (0.0, 0.0);
            assert_eq!(
                unsafe { symsep_dm_entry(dm, i, j, &mut re, &mut im) },
                SymsepStatus::Ok
            );
            let expect = closed.matrix().get(i as usize, j as usize);
            assert!((re - expect.re).abs() < 1e-12);
            assert!((im - expect.im).abs() < 1e-12);
        }
    }

    // entanglement measures through the ABI
    let mut eof_bits = 0.0f64;
    assert_eq!(
        unsafe { symsep_eof_two_qubit(dm, true, &mut eof_bits) },
        SymsepStatus::Ok
    );
    assert!(eof_bits > 0.0 && eof_bits < 1.0);

    let mut ppt = true;
    assert_eq!(unsafe { symsep_is_ppt(dm, 1, &mut ppt) }, SymsepStatus::Ok);
    assert!(!ppt, "k=2 reduction is entangled");

    let (mut value, mut gap, mut iters) = (0.0f64, 0.0f64, 0u64);
    assert_eq!(
        unsafe { symsep_sep_distance(dm, 1, 1e-7, &mut value, &mut gap, &mut iters) },
        SymsepStatus::Ok
    );
    assert!(value > 0.0 && value <= 4.0 / 4.0 + 1e-6);

    // the chain bound holds through the ABI too
    let mut eof_nats = 0.0f64;
    assert_eq!(
        unsafe { symsep_eof_two_qubit(dm, false, &mut eof_nats) },
        SymsepStatus::Ok
    );
    let mut upper = 0.0f64;
    assert_eq!(
        unsafe { symsep_pinsker_upper(eof_nats, &mut upper) },
        SymsepStatus::Ok
    );
    assert!(value <= upper + 1e-6);

    unsafe { symsep_dm_free(dm) };
}

#[test]
fn state_handles_and_reduction() {
    let mut state: *mut SymsepState = ptr::null_mut();
    assert_eq!(
        unsafe { symsep_random_symmetric_state(7, 0, 1, 6, &mut state) },
        SymsepStatus::Ok
    );
    let mut dm: *mut SymsepDensityMatrix = ptr::null_mut();
    assert_eq!(
        unsafe { symsep_reduce_two_sites(state, &mut dm) },
        SymsepStatus::Ok
    );
    let mut dim = 0u64;
    assert_eq!(unsafe { symsep_dm_dim(dm, &mut dim) }, SymsepStatus::Ok);
    assert_eq!(dim, 4);

    // same (seed, stream) reproduces the same reduction entry
    let mut state2: *mut SymsepState = ptr::null_mut();
    assert_eq!(
        unsafe { symsep_random_symmetric_state(7, 0, 1, 6, &mut state2) },
        SymsepStatus::Ok
    );
    let mut dm2: *mut SymsepDensityMatrix = ptr::null_mut();
    assert_eq!(
        unsafe { symsep_reduce_two_sites(state2, &mut dm2) },
        SymsepStatus::Ok
    );
    let (mut re1, mut im1, mut re2, mut im2) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(symsep_dm_entry(dm, 1, 2, &mut re1, &mut im1), SymsepStatus::Ok);
        assert_eq!(symsep_dm_entry(dm2, 1, 2, &mut re2, &mut im2), SymsepStatus::Ok);
    }
    assert_eq!((re1, im1), (re2, im2));

    unsafe {
        symsep_dm_free(dm);
        symsep_dm_free(dm2);
        symsep_state_free(state);
        symsep_state_free(state2);
    }
}

#[test]
fn dicke_state_and_floor() {
    let occupation = [2u32, 2];
    let mut state: *mut SymsepState = ptr::null_mut();
    assert_eq!(
        unsafe { symsep_dicke_state(1, 4, occupation.as_ptr(), 2, &mut state) },
        SymsepStatus::Ok
    );
    unsafe { symsep_state_free(state) };

    // bad occupation is an argument error
    let bad = [1u32, 1];
    let mut state2: *mut SymsepState = ptr::null_mut();
    assert_eq!(
        unsafe { symsep_dicke_state(1, 4, bad.as_ptr(), 2, &mut state2) },
        SymsepStatus::InvalidArgument
    );

    let mut floor = 0.0f64;
    assert_eq!(
        unsafe { symsep_schmidt_weight_floor(1, 4, &mut floor) },
        SymsepStatus::Ok
    );
    assert!((floor - 0.6).abs() < 1e-15);
}

#[test]
fn symmetry_test_probability_through_abi() {
    // |01> over two qubits accepts with probability 1/2
    let re = [0.0, 1.0, 0.0, 0.0];
    let im = [0.0; 4];
    let dims = [2u64, 2];
    let mut prob = 0.0f64;
    assert_eq!(
        unsafe {
            symsep_symmetry_test_probability(re.as_ptr(), im.as_ptr(), 4, dims.as_ptr(), 2, &mut prob)
        },
        SymsepStatus::Ok
    );
    assert!((prob - 0.5).abs() < 1e-12);

    // non-normalized input is an argument error
    let re_bad = [2.0, 0.0, 0.0, 0.0];
    assert_eq!(
        unsafe {
            symsep_symmetry_test_probability(
                re_bad.as_ptr(),
                im.as_ptr(),
                4,
                dims.as_ptr(),
                2,
                &mut prob,
            )
        },
        SymsepStatus::InvalidArgument
    );
}

#[test]
fn rho_bar_is_ppt_boundary() {
    let mut dm: *mut SymsepDensityMatrix = ptr::null_mut();
    assert_eq!(unsafe { symsep_rho_bar(2, &mut dm) }, SymsepStatus::Ok);
    let mut ppt = false;
    assert_eq!(unsafe { symsep_is_ppt(dm, 1, &mut ppt) }, SymsepStatus::Ok);
    assert!(ppt);
    let mut neg = 1.0f64;
    assert_eq!(unsafe { symsep_negativity(dm, 1, &mut neg) }, SymsepStatus::Ok);
    assert!(neg.abs() < 1e-9);
    unsafe { symsep_dm_free(dm) };
}

#[test]
fn null_handles_are_rejected_not_crashed() {
    let mut out = 0.0f64;
    assert_eq!(
        unsafe { symsep_eof_two_qubit(ptr::null(), true, &mut out) },
        SymsepStatus::NullPointer
    );
    let mut dim = 0u64;
    assert_eq!(
        unsafe { symsep_dm_dim(ptr::null(), &mut dim) },
        SymsepStatus::NullPointer
    );
    unsafe {
        symsep_dm_free(ptr::null_mut());
        symsep_state_free(ptr::null_mut());
    }
}
