use std::ffi::CStr;
use std::ptr;

use gue_crowding_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(gue_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn table_round_trip() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(gue_table_new(&mut t), GueStatus::Ok);
        assert!(!t.is_null());
        let mut v = 0.0;
        assert_eq!(gue_table_q(t, 0.0, &mut v), GueStatus::Ok);
        assert!((v - 0.367_061_5).abs() < 1e-6);
        assert_eq!(gue_tracy_widom_f2(t, 0.0, &mut v), GueStatus::Ok);
        assert!(v > 0.9 && v < 1.0);
        assert_eq!(gue_rho_edge(t, 0.3, &mut v), GueStatus::Ok);
        assert!((v - 0.0434).abs() < 1e-3);
        assert_eq!(gue_p_typ(t, 1.0, &mut v), GueStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(gue_a4(t, &mut v), GueStatus::Ok);
        assert!((v + 0.1968).abs() < 1e-3);
        assert_eq!(last_error(), "");
        gue_table_free(t);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(gue_table_new(&mut t), GueStatus::Ok);
        let mut v = 0.0;
        assert_eq!(gue_table_q(t, 50.0, &mut v), GueStatus::InvalidArgument);
        assert!(last_error().contains("outside"), "{}", last_error());
        assert_eq!(gue_rho_edge(t, -1.0, &mut v), GueStatus::InvalidArgument);
        assert_eq!(gue_rho_edge(t, 1.0, ptr::null_mut()), GueStatus::NullPointer);
        assert_eq!(gue_rho_edge(ptr::null(), 1.0, &mut v), GueStatus::NullPointer);
        assert_eq!(gue_tracy_widom_f2(t, f64::NAN, &mut v), GueStatus::InvalidArgument);
        gue_table_free(t);
        gue_table_free(ptr::null_mut());
        assert_eq!(gue_table_new(ptr::null_mut()), GueStatus::NullPointer);
    }
}

#[test]
fn finite_n_values() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(gue_cdf_lambda_max(8.0, 4, &mut v), GueStatus::Ok);
        assert!((v - 1.0).abs() < 1e-10);
        let s: f64 = 1.3;
        assert_eq!(gue_gap_pdf_exact(s, 2, &mut v), GueStatus::Ok);
        let oracle = (2.0 / std::f64::consts::PI).sqrt() * s * s * (-0.5 * s * s).exp();
        assert!((v - oracle).abs() < 1e-6);
        assert_eq!(gue_dos_exact(0.5, 1, &mut v), GueStatus::InvalidArgument);
        assert_eq!(gue_cdf_lambda_max(0.0, 40, &mut v), GueStatus::InvalidArgument);
    }
    assert!(gue_gap_tail_asymptotic(12.0) > 0.0);
}

#[test]
fn sampler_handles() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(gue_sampler_new(5, 42, &mut s), GueStatus::Ok);
        let mut a = [0.0; 5];
        let mut b = [0.0; 5];
        assert_eq!(gue_sampler_spectrum(s, 3, a.as_mut_ptr(), a.len()), GueStatus::Ok);
        assert_eq!(gue_sampler_spectrum(s, 3, b.as_mut_ptr(), b.len()), GueStatus::Ok);
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] >= w[1]));
        let mut small = [0.0; 3];
        assert_eq!(gue_sampler_spectrum(s, 0, small.as_mut_ptr(), small.len()), GueStatus::BufferTooSmall);
        assert_eq!(gue_sampler_spectrum(s, 0, ptr::null_mut(), 5), GueStatus::NullPointer);
        gue_sampler_free(s);
        assert_eq!(gue_sampler_new(0, 1, &mut s), GueStatus::InvalidArgument);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(gue_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
