use std::ffi::CStr;
use std::ptr;

use kakeya_lab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kl_last_error_message()) }.to_string_lossy().into_owned()
}

fn sphere(m: usize) -> *mut KlMeasure {
    let mut out = ptr::null_mut();
    let axis = [0.0, 0.0, 1.0];
    let status = unsafe { kl_measure_sphere(3, axis.as_ptr(), std::f64::consts::FRAC_PI_4, m, 3, &mut out) };
    assert_eq!(status, KlStatus::Ok, "{}", last_error());
    out
}

#[test]
fn metric_matches_closed_form() {
    let (s, t) = ([1.0, 0.0, 0.0], [1.0, 1.0, 0.0]);
    let mut d = 0.0;
    assert_eq!(unsafe { kl_metric(3, 1, s.as_ptr(), t.as_ptr(), &mut d) }, KlStatus::Ok);
    let angle = std::f64::consts::FRAC_PI_4;
    assert!((d - (2.0 - 2.0 * angle.cos()).sqrt()).abs() < 1e-12);
    assert_eq!(last_error(), "");
}

#[test]
fn errors_map_to_status_codes() {
    let s = [1.0, 0.0, 0.0, 2.0, 0.0, 0.0];
    let mut d = 0.0;
    assert_eq!(unsafe { kl_metric(3, 2, s.as_ptr(), s.as_ptr(), &mut d) }, KlStatus::RankDeficient);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { kl_metric(3, 1, ptr::null(), s.as_ptr(), &mut d) }, KlStatus::NullPointer);
    assert_eq!(d, 0.0);

    let mut out = ptr::null_mut();
    let axis = [0.0, 0.0, 1.0];
    let status = unsafe { kl_measure_sphere(3, axis.as_ptr(), 1.6, 64, 1, &mut out) };
    assert_eq!(status, KlStatus::DegenerateSphere);
    assert!(out.is_null());

    let mut b = KlSplitBound::default();
    assert_eq!(unsafe { kl_split_bound(0.5, 1.5, 10.0, &mut b) }, KlStatus::BadParameters);
}

#[test]
fn phi_hat_at_origin_is_one() {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { kl_phi_hat(0.0, &mut re, &mut im) }, KlStatus::Ok);
    assert!((re - 1.0).abs() < 1e-9 && im.abs() < 1e-12);
    assert_eq!(unsafe { kl_phi_hat(f64::NAN, &mut re, &mut im) }, KlStatus::BadParameters);
}

#[test]
fn slab_masses_through_handles() {
    let m = sphere(512);
    unsafe {
        assert_eq!(kl_measure_len(m), 512);
        assert_eq!(kl_measure_ambient_dim(m), 3);
        let mut mass = 0.0;
        let axis = [0.0, 0.0, 1.0];
        assert_eq!(kl_slab_mass(m, axis.as_ptr(), 3, 0.5, &mut mass), KlStatus::Ok);
        assert_eq!(mass, 0.0);
        let zero = [0.0; 3];
        assert_eq!(kl_slab_mass(m, zero.as_ptr(), 3, 0.5, &mut mass), KlStatus::ZeroFrequency);

        let mut dir = [0.0; 3];
        assert_eq!(kl_worst_case_slab_mass(m, 0.1, 500, 1, &mut mass, dir.as_mut_ptr()), KlStatus::Ok);
        assert!(mass > 0.0 && mass <= 1.0);
        assert!((dir.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-9);

        let grid = [0.125, 0.0625, 0.03125, 0.015625, 0.0078125];
        let (mut beta, mut r2) = (0.0, 0.0);
        let mut sup = [0.0; 5];
        let status = kl_fit_beta(m, grid.as_ptr(), 5, 500, 1, &mut beta, &mut r2, sup.as_mut_ptr());
        assert_eq!(status, KlStatus::Ok, "{}", last_error());
        assert!((beta - 0.5).abs() < 0.15, "{beta}");
        assert!(sup.windows(2).all(|w| w[0] >= w[1]));
        kl_measure_free(m);
    }
}

#[test]
fn hyperplane_and_uniform_constructors() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(kl_measure_uniform(2, 1, 16, 5000, 1, &mut m), KlStatus::Ok);
        assert!(kl_measure_len(m) > 10);
        kl_measure_free(m);

        let v = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let mut h = ptr::null_mut();
        assert_eq!(kl_measure_hyperplane(3, 1, v.as_ptr(), 16, 5000, 1, &mut h), KlStatus::Ok);
        let normal = [0.0, 0.0, 1.0];
        let mut mass = 0.0;
        assert_eq!(kl_slab_mass(h, normal.as_ptr(), 3, 0.01, &mut mass), KlStatus::Ok);
        assert_eq!(mass, 1.0);
        kl_measure_free(h);
    }
}

#[test]
fn translations_leave_envelope_alone() {
    let m = sphere(128);
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(kl_spec_new(m, KlTranslation::Zero, 0.0, 1, &mut a), KlStatus::Ok);
        assert_eq!(kl_spec_new(m, KlTranslation::RandomBox, 1.0, 1, &mut b), KlStatus::Ok);
        let flat: Vec<f64> = (0..128 * 3).map(|i| (i % 7) as f64 * 0.1).collect();
        let mut c = ptr::null_mut();
        assert_eq!(kl_spec_with_translations(m, flat.as_ptr(), flat.len(), &mut c), KlStatus::Ok);
        let mut bad = ptr::null_mut();
        assert_eq!(kl_spec_with_translations(m, flat.as_ptr(), 5, &mut bad), KlStatus::LengthMismatch);
        kl_measure_free(m);

        let xi = [4.0, -1.5, 2.5];
        let envelope = |s| {
            let mut e = 0.0;
            assert_eq!(kl_mu_hat_envelope(s, xi.as_ptr(), 3, &mut e), KlStatus::Ok);
            e
        };
        let e = envelope(a);
        assert_eq!(e.to_bits(), envelope(b).to_bits());
        assert_eq!(e.to_bits(), envelope(c).to_bits());
        for s in [a, b, c] {
            let (mut re, mut im) = (0.0, 0.0);
            assert_eq!(kl_mu_hat(s, xi.as_ptr(), 3, &mut re, &mut im), KlStatus::Ok);
            assert!(re.hypot(im) <= e * (1.0 + 1e-12));
            assert_eq!(kl_mu_hat(s, xi.as_ptr(), 2, &mut re, &mut im), KlStatus::DimensionMismatch);
            kl_spec_free(s);
        }
    }
}

#[test]
fn cone_spec() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(kl_spec_cone(3, 128, 1, &mut s), KlStatus::Ok);
        let mut e = 0.0;
        let xi = [0.0, 0.0, 1e-3];
        assert_eq!(kl_mu_hat_envelope(s, xi.as_ptr(), 3, &mut e), KlStatus::Ok);
        assert!((e - 1.0).abs() < 1e-3);
        kl_spec_free(s);
        assert_eq!(kl_spec_cone(2, 128, 1, &mut s), KlStatus::BadDimensions);
    }
}

#[test]
fn free_accepts_null() {
    unsafe {
        kl_measure_free(ptr::null_mut());
        kl_spec_free(ptr::null_mut());
        assert_eq!(kl_measure_len(ptr::null()), 0);
    }
}

#[test]
fn split_bound_terms_agree() {
    let mut b = KlSplitBound::default();
    assert_eq!(unsafe { kl_split_bound(0.5, 0.9, 1e4, &mut b) }, KlStatus::Ok);
    assert!((b.slab_term - b.tail_term).abs() <= 1e-12 * b.slab_term);
    assert!((b.total - 2.0 * b.slab_term).abs() <= 1e-12 * b.total);
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(kl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
