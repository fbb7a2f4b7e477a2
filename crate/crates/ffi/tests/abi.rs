use std::ffi::CStr;
use std::ptr;

use switchstab_ffi::*;

const A0: [f64; 4] = [-1.0, 3.0, -1.0 / 3.0, -1.0];
const A1: [f64; 4] = [-1.0, -1.0 / 3.0, 3.0, -1.0];

fn last_error() -> String {
    unsafe { CStr::from_ptr(sws_last_error_message()) }
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn system_lifecycle_and_chi_mc() {
    let mut sys = ptr::null_mut();
    let st = unsafe { sws_system_new(A0.as_ptr(), A1.as_ptr(), 0.5, 2.0, &mut sys) };
    assert_eq!(st, SwsStatus::Ok);
    assert!(!sys.is_null());
    let mut e = SwsEstimate::default();
    let st = unsafe { sws_chi_mc(sys, 0.9, 0, 2000.0, 4, 7, &mut e) };
    assert_eq!(st, SwsStatus::Ok);
    assert!(e.value < 0.0 && e.std_error > 0.0);
    let mut again = SwsEstimate::default();
    unsafe { sws_chi_mc(sys, 0.9, 0, 2000.0, 4, 7, &mut again) };
    assert_eq!(e.value, again.value);
    let mut p = SwsEstimate::default();
    assert_eq!(
        unsafe { sws_product_lyapunov(sys, 0, 2000, 2, 1, &mut p) },
        SwsStatus::Ok
    );
    assert_eq!(
        unsafe { sws_product_lyapunov(sys, 5, 2000, 2, 1, &mut p) },
        SwsStatus::Domain
    );
    unsafe { sws_system_free(sys) };
    unsafe { sws_system_free(ptr::null_mut()) };
}

#[test]
fn non_hurwitz_reports_status_and_message() {
    let bad = [1.0, 0.0, 0.0, -1.0];
    let mut sys = ptr::null_mut();
    let st = unsafe { sws_system_new(bad.as_ptr(), A1.as_ptr(), 0.5, 2.0, &mut sys) };
    assert_eq!(st, SwsStatus::NotHurwitz);
    assert!(sys.is_null());
    assert_eq!(last_error(), "A0 not Hurwitz");
}

#[test]
fn null_pointers_are_rejected() {
    let mut out = 0.0;
    assert_eq!(
        unsafe { sws_chi_exact(ptr::null(), 1.0, &mut out) },
        SwsStatus::NullPointer
    );
    assert!(last_error().contains("model"));
    assert_eq!(
        unsafe { sws_expm2(ptr::null(), 1.0, &mut out) },
        SwsStatus::NullPointer
    );
}

#[test]
fn model_quantities() {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { sws_model_rotations(1.0, 3.0, &mut m) },
        SwsStatus::Ok
    );
    let mut bc = 0.0;
    assert_eq!(unsafe { sws_beta_c(m, 1e-12, &mut bc) }, SwsStatus::Ok);
    assert!((bc - 7.177385516293443).abs() < 1e-9);
    let mut chi = 1.0;
    assert_eq!(unsafe { sws_chi_exact(m, 0.0, &mut chi) }, SwsStatus::Ok);
    assert!((chi + 1.0).abs() < 1e-10);
    unsafe { sws_model_free(m) };

    let mut j = ptr::null_mut();
    assert_eq!(unsafe { sws_model_jordan(-1.0, &mut j) }, SwsStatus::Domain);
    assert!(j.is_null());

    let mut r = ptr::null_mut();
    unsafe { sws_model_rotations(1.0, 1.5, &mut r) };
    assert_eq!(
        unsafe { sws_beta_c(r, 1e-12, &mut bc) },
        SwsStatus::NoTransition
    );
    unsafe { sws_model_free(r) };
}

#[test]
fn criterion_certificate_classify_expm() {
    let mut c = SwsCriterion::default();
    assert_eq!(
        unsafe { sws_criterion(A0.as_ptr(), A1.as_ptr(), &mut c) },
        SwsStatus::Ok
    );
    assert!(c.holds && c.has_window && c.window_lo < 0.5 && c.window_hi > 0.5);

    let mut cert = SwsCertificate::default();
    assert_eq!(
        unsafe { sws_certificate(A0.as_ptr(), A1.as_ptr(), 0.5, &mut cert) },
        SwsStatus::Ok
    );
    assert!(cert.beta1_finite && cert.beta1 > 0.0);
    let id = [-1.0, 0.0, 0.0, -1.0];
    unsafe { sws_certificate(id.as_ptr(), id.as_ptr(), 0.5, &mut cert) };
    assert!(!cert.beta1_finite && cert.beta1.is_infinite());

    let mut cl = SwsClassification {
        label: SwsCase::A,
        verdict: SwsVerdict::UniqueInvariantMeasure,
        swapped: false,
        degenerate: false,
        has_interval: false,
        interval_start: 0.0,
        interval_end: 0.0,
    };
    assert_eq!(
        unsafe { sws_classify(A0.as_ptr(), A1.as_ptr(), 0.5, &mut cl) },
        SwsStatus::Ok
    );
    assert_eq!(cl.label, SwsCase::ErgodicNoZeros);
    let j0 = [-1.0, 4.0, 0.0, -1.0];
    let j1 = [-1.0, 0.0, 4.0, -1.0];
    unsafe { sws_classify(j0.as_ptr(), j1.as_ptr(), 0.5, &mut cl) };
    assert_eq!(cl.verdict, SwsVerdict::TwoRecurrentClasses);
    assert!(cl.has_interval);

    let mut e = [0.0; 4];
    assert_eq!(
        unsafe { sws_expm2(id.as_ptr(), 2.0, e.as_mut_ptr()) },
        SwsStatus::Ok
    );
    assert!((e[0] - (-2.0f64).exp()).abs() < 1e-15 && e[1] == 0.0);
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/switchstab.h"))
        .unwrap();
    for name in [
        "sws_system_new",
        "sws_chi_mc",
        "sws_chi_exact",
        "sws_beta_c",
        "sws_certificate",
        "sws_product_lyapunov",
        "sws_classify",
        "sws_criterion",
        "sws_expm2",
        "sws_last_error_message",
        "typedef struct SwsSystem SwsSystem",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
