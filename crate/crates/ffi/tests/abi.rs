use std::ffi::{CStr, CString};
use std::ptr;

use sl2lab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sl2_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn scalar_functions() {
    let (mut re, mut im) = (0.0, 0.0);
    unsafe {
        assert_eq!(sl2_phi(1.0, 0.0, 2.0, 1e-12, &mut re, &mut im), Sl2Status::Ok);
        assert_eq!((re, im), (1.0, 0.0));
        assert_eq!(sl2_c_function(1.0, 0.0, &mut re, &mut im), Sl2Status::Ok);
        assert_eq!(re, 1.0);
        let mut rate = 0.0;
        assert_eq!(sl2_eigenvalue_to_rate(0.16, &mut rate), Sl2Status::Ok);
        assert!((rate - 0.4).abs() < 1e-15);
        let mut lambda = 0.0;
        assert_eq!(sl2_rate_to_eigenvalue(rate, &mut lambda), Sl2Status::Ok);
        assert!((lambda - 0.16).abs() < 1e-15);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut x = 0.0;
    unsafe {
        assert_eq!(sl2_eigenvalue_to_rate(0.3, &mut x), Sl2Status::Domain);
        assert!(last_error().contains("0.3"));
        assert_eq!(sl2_eigenvalue_to_rate(0.1, ptr::null_mut()), Sl2Status::NullPointer);
        assert!(last_error().starts_with("null pointer"));
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(sl2_phi(1.5, 0.0, 1.0, 1e-12, &mut re, &mut im), Sl2Status::Domain);
        let mut o = ptr::null_mut();
        let bad = CString::new("2; (); ()").unwrap();
        assert_eq!(sl2_origami_parse(bad.as_ptr(), &mut o), Sl2Status::InvalidInput);
        assert!(o.is_null());
    }
}

#[test]
fn origami_handle() {
    let record = CString::new("3; (1 2); (1 3)").unwrap();
    unsafe {
        let mut o = ptr::null_mut();
        assert_eq!(sl2_origami_parse(record.as_ptr(), &mut o), Sl2Status::Ok);
        let mut g = 0;
        assert_eq!(sl2_origami_genus(o, &mut g), Sl2Status::Ok);
        assert_eq!(g, 2);
        let mut n = 0;
        assert_eq!(sl2_origami_n_squares(o, &mut n), Sl2Status::Ok);
        assert_eq!(n, 3);
        let mut sys = 0.0;
        assert_eq!(sl2_origami_systole(o, &mut sys), Sl2Status::Ok);
        assert_eq!(sys, 1.0);

        let mut list = ptr::null_mut();
        assert_eq!(sl2_origami_saddles(o, 2.5, 0, &mut list), Sl2Status::Ok);
        let mut len = 0;
        assert_eq!(sl2_saddles_len(list, &mut len), Sl2Status::Ok);
        assert!(len > 0);
        let mut prev = 0.0;
        for i in 0..len {
            let mut s = std::mem::zeroed::<Sl2Saddle>();
            assert_eq!(sl2_saddles_get(list, i, &mut s), Sl2Status::Ok);
            assert!(s.length >= prev && s.length <= 2.5 + 1e-9);
            prev = s.length;
        }
        let mut s = std::mem::zeroed::<Sl2Saddle>();
        assert_eq!(sl2_saddles_get(list, len, &mut s), Sl2Status::InvalidInput);
        sl2_saddles_free(list);

        let mut over = ptr::null_mut();
        assert_eq!(sl2_origami_saddles(o, 50.0, 1000, &mut over), Sl2Status::Resource);
        assert!(over.is_null());

        let mut stretched = ptr::null_mut();
        assert_eq!(sl2_origami_apply(o, 2.0, 0.0, 0.0, 0.5, &mut stretched), Sl2Status::Ok);
        assert_eq!(sl2_origami_systole(stretched, &mut sys), Sl2Status::Ok);
        assert_eq!(sys, 0.5);
        let mut text = ptr::null_mut();
        assert_eq!(sl2_origami_record(stretched, &mut text), Sl2Status::Ok);
        let back = CStr::from_ptr(text).to_str().unwrap().to_owned();
        sl2_string_free(text);
        let mut again = ptr::null_mut();
        let back = CString::new(back).unwrap();
        assert_eq!(sl2_origami_parse(back.as_ptr(), &mut again), Sl2Status::Ok);
        let mut sys2 = 0.0;
        sl2_origami_systole(again, &mut sys2);
        assert_eq!(sys2, 0.5);

        assert_eq!(sl2_origami_apply(o, 1.0, 0.0, 0.0, -1.0, &mut again), Sl2Status::InvalidInput);
        sl2_origami_free(again);
        sl2_origami_free(stretched);
        sl2_origami_free(o);
        sl2_origami_free(ptr::null_mut());
    }
}

#[test]
fn transform_handle() {
    let (s, w) = ([1.0], [1.0]);
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(sl2_transform_new(s.as_ptr(), w.as_ptr(), 1, 0.1, &mut f), Sl2Status::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(sl2_transform_eval(f, 2.0, 0.0, &mut re, &mut im), Sl2Status::Ok);
        // the trivial atom has F(z) = 1/z
        assert!((re - 0.5).abs() < 1e-12 && im.abs() < 1e-12, "{re} {im}");
        assert_eq!(sl2_transform_eval(f, 0.0, 0.0, &mut re, &mut im), Sl2Status::Pole);
        sl2_transform_free(f);

        let (s, w) = ([0.6, 0.2], [1.0, 1.0]);
        let mut g = ptr::null_mut();
        assert_eq!(sl2_transform_new(s.as_ptr(), w.as_ptr(), 2, 0.1, &mut g), Sl2Status::InvalidInput);
        assert_eq!(sl2_transform_new(ptr::null(), w.as_ptr(), 2, 0.1, &mut g), Sl2Status::NullPointer);
    }
}

#[test]
fn exponential_fit() {
    let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
    let y: Vec<f64> = t.iter().map(|t| 2.0 * (-0.3 * t).exp() + (-0.9 * t).exp()).collect();
    let (mut rates, mut coeffs, mut res) = ([0.0; 2], [0.0; 2], 0.0);
    let status = unsafe {
        sl2_fit_exponential_sum(
            t.as_ptr(),
            y.as_ptr(),
            t.len(),
            2,
            f64::NEG_INFINITY,
            f64::INFINITY,
            rates.as_mut_ptr(),
            coeffs.as_mut_ptr(),
            &mut res,
        )
    };
    assert_eq!(status, Sl2Status::Ok, "{}", last_error());
    assert!((rates[0] - 0.3).abs() < 1e-8 && (rates[1] - 0.9).abs() < 1e-8);
    assert!((coeffs[0] - 2.0).abs() < 1e-7 && (coeffs[1] - 1.0).abs() < 1e-7);
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sl2_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
