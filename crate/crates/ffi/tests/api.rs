use std::ffi::CStr;
use std::ptr;

use sisi_ffi::*;

fn endemic() -> *mut SisiParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sisi_params_new(0.2, 0.3, 0.7, 0.6, 1.0, 0.3, &mut p) }, SisiStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let m = sisi_last_error_message();
    assert!(!m.is_null());
    unsafe { CStr::from_ptr(m) }.to_str().unwrap().to_string()
}

#[test]
fn rejects_negative_parameters_with_message() {
    let mut p = ptr::null_mut();
    let status = unsafe { sisi_params_new(-0.2, 0.3, 0.7, 0.6, 1.0, 0.3, &mut p) };
    assert_eq!(status, SisiStatus::InvalidParameter);
    assert!(p.is_null());
    assert!(last_error().contains('b'));
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        assert_eq!(sisi_params_new(0.2, 0.3, 0.7, 0.6, 1.0, 0.3, ptr::null_mut()), SisiStatus::NullPointer);
        let mut out = [0.0; 4];
        assert_eq!(sisi_apply(ptr::null(), [0.25; 4].as_ptr(), out.as_mut_ptr()), SisiStatus::NullPointer);
        assert_eq!(sisi_trajectory_len(ptr::null()), 0);
        assert_eq!(sisi_fixed_point_count(ptr::null()), 0);
        sisi_params_free(ptr::null_mut());
        sisi_trajectory_free(ptr::null_mut());
        sisi_fixed_point_set_free(ptr::null_mut());
    }
}

#[test]
fn validation_mask() {
    let p = endemic();
    let mut v = SisiValidation { is_qso: false, is_identity: true, violated_mask: 99 };
    unsafe {
        assert_eq!(sisi_params_validate(p, &mut v), SisiStatus::Ok);
        assert_eq!(v, SisiValidation { is_qso: true, is_identity: false, violated_mask: 0 });
        let mut q = ptr::null_mut();
        sisi_params_new(0.2, 0.9, 0.7, 0.6, 1.0, 0.3, &mut q);
        sisi_params_validate(q, &mut v);
        assert_eq!(v.violated_mask, 1);
        sisi_params_free(q);
        sisi_params_free(p);
    }
}

#[test]
fn apply_and_success_clears_error() {
    let p = endemic();
    let mut out = [0.0; 4];
    unsafe {
        assert_eq!(sisi_apply(p, [0.5; 4].as_ptr(), out.as_mut_ptr()), SisiStatus::NotInSimplex);
        assert!(!sisi_last_error_message().is_null());
        assert_eq!(sisi_apply(p, [0.25; 4].as_ptr(), out.as_mut_ptr()), SisiStatus::Ok);
        assert!(sisi_last_error_message().is_null());
        sisi_params_free(p);
    }
    for (a, b) in out.iter().zip([0.343125, 0.181875, 0.22625, 0.24875]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn trajectory_accessors() {
    let p = endemic();
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(sisi_iterate(p, [0.4, 0.3, 0.2, 0.1].as_ptr(), 1_000_000, 1e-10, &mut t), SisiStatus::Ok);
        let n = sisi_trajectory_len(t);
        assert!(n > 2);
        let (mut kind, mut at) = (SisiTrajectoryKind::MaxIters, 0);
        assert_eq!(sisi_trajectory_status(t, &mut kind, &mut at), SisiStatus::Ok);
        assert_eq!(kind, SisiTrajectoryKind::Converged);
        let (mut step, mut s) = (0u64, [0.0; 4]);
        assert_eq!(sisi_trajectory_get(t, n - 1, &mut step, s.as_mut_ptr()), SisiStatus::Ok);
        assert_eq!(step, at);
        assert!((s[0] - 0.617_968_333_6).abs() < 1e-8);
        assert_eq!(sisi_trajectory_get(t, n, &mut step, s.as_mut_ptr()), SisiStatus::IndexOutOfRange);
        sisi_trajectory_free(t);

        let mut t = ptr::null_mut();
        assert_eq!(sisi_iterate(p, [0.4, 0.3, 0.2, 0.1].as_ptr(), 0, 1e-10, &mut t), SisiStatus::PreconditionViolated);
        assert!(t.is_null());
        sisi_params_free(p);
    }
}

#[test]
fn force_roots() {
    let p = endemic();
    let mut r = SisiRoot { kind: SisiRootKind::NoPositiveRoot, lower: 0.0, upper: 0.0, residual: 0.0 };
    unsafe {
        assert_eq!(sisi_solve_force_equation(p, &mut r), SisiStatus::Ok);
        assert_eq!(r.kind, SisiRootKind::UniquePositive);
        assert!((r.lower - 0.176_630_255_520_889_7).abs() < 1e-14 && r.lower == r.upper);

        let mut q = ptr::null_mut();
        sisi_params_new(0.1, 0.55, 1.1, 0.5, 0.35, 0.55, &mut q);
        sisi_solve_force_equation(q, &mut r);
        assert_eq!(r.kind, SisiRootKind::TwoPositive);
        assert!(0.0 < r.lower && r.lower < r.upper);

        sisi_params_new(0.2, 0.3, 0.7, 0.6, 0.5, 0.3, &mut q);
        sisi_solve_force_equation(q, &mut r);
        assert_eq!(r.kind, SisiRootKind::NoPositiveRoot);
        assert!(r.lower.is_nan());
        sisi_params_free(q);
        sisi_params_free(p);
    }
}

#[test]
fn fixed_points_and_classification() {
    let p = endemic();
    let mut set = ptr::null_mut();
    unsafe {
        assert_eq!(sisi_fixed_points(p, &mut set), SisiStatus::Ok);
        assert_eq!(sisi_fixed_point_count(set), 2);
        assert_eq!(sisi_fixed_point_face_count(set), 0);
        let mut fp = SisiFixedPoint { label: SisiLabel::Interior, point: [0.0; 4], fixedness_residual: 1.0 };
        assert_eq!(sisi_fixed_point_get(set, 1, &mut fp), SisiStatus::Ok);
        assert_eq!(fp.label, SisiLabel::Lambda17);
        assert!(fp.fixedness_residual < 1e-10);
        assert_eq!(sisi_fixed_point_get(set, 2, &mut fp), SisiStatus::IndexOutOfRange);

        let mut c =
            SisiClassification { kind: SisiStabilityKind::Saddle, re: [0.0; 4], im: [0.0; 4], moduli: [0.0; 4] };
        assert_eq!(sisi_classify(p, fp.point.as_ptr(), 1e-8, &mut c), SisiStatus::Ok);
        assert_eq!(c.kind, SisiStabilityKind::Attracting);
        assert!(c.moduli.iter().all(|&m| m < 1.0));
        assert_eq!(sisi_classify(p, [0.25; 4].as_ptr(), 1e-8, &mut c), SisiStatus::NotAFixedPoint);
        sisi_fixed_point_set_free(set);
        sisi_params_free(p);
    }
}

#[test]
fn faces_are_reported_as_masks() {
    let mut p = ptr::null_mut();
    let mut set = ptr::null_mut();
    let mut mask = 0xff;
    unsafe {
        // b = beta2 = k2 = 0 fixes the whole face u = 0
        sisi_params_new(0.0, 0.3, 0.7, 0.0, 1.0, 0.0, &mut p);
        sisi_fixed_points(p, &mut set);
        assert_eq!(sisi_fixed_point_face_count(set), 1);
        assert_eq!(sisi_fixed_point_face_get(set, 0, &mut mask), SisiStatus::Ok);
        assert_eq!(mask, 0b0010);
        sisi_fixed_point_set_free(set);
        sisi_params_free(p);
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(sisi_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
