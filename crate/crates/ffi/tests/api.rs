use std::ffi::{CStr, CString};
use std::ptr;

use bjorth_ffi::*;

fn matrix(rows: usize, cols: usize, re: &[f64], im: Option<&[f64]>) -> *mut BjMatrix {
    let mut m = ptr::null_mut();
    let status = unsafe { bj_matrix_new(rows, cols, re.as_ptr(), im.map_or(ptr::null(), |v| v.as_ptr()), &mut m) };
    assert_eq!(status, BjStatus::Ok);
    m
}

fn last_error() -> Option<String> {
    let p = bj_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn matrix_round_trip() {
    let m = matrix(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], Some(&[0.5, 0.0, 0.0, 0.0, 0.0, -1.0]));
    let (mut r, mut c) = (0, 0);
    let (mut re, mut im) = (0.0, 0.0);
    unsafe {
        assert_eq!(bj_matrix_shape(m, &mut r, &mut c), BjStatus::Ok);
        assert_eq!((r, c), (2, 3));
        assert_eq!(bj_matrix_get(m, 1, 2, &mut re, &mut im), BjStatus::Ok);
        assert_eq!((re, im), (6.0, -1.0));
        assert_eq!(bj_matrix_get(m, 0, 0, &mut re, &mut im), BjStatus::Ok);
        assert_eq!((re, im), (1.0, 0.5));
        assert_eq!(bj_matrix_get(m, 2, 0, &mut re, &mut im), BjStatus::InvalidArgument);
        assert!(last_error().unwrap().contains("out of range"));
        bj_matrix_free(m);
    }
}

#[test]
fn construction_rejects_bad_input() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(bj_matrix_new(2, 2, ptr::null(), ptr::null(), &mut m), BjStatus::NullPointer);
        assert_eq!(bj_matrix_new(0, 2, [1.0].as_ptr(), ptr::null(), &mut m), BjStatus::InvalidArgument);
        assert_eq!(bj_matrix_new(1, 1, [f64::NAN].as_ptr(), ptr::null(), &mut m), BjStatus::NonFinite);
        assert_eq!(bj_matrix_new(1, 1, [1.0].as_ptr(), ptr::null(), ptr::null_mut()), BjStatus::NullPointer);
    }
    assert!(m.is_null());
}

#[test]
fn freeing_null_is_ignored() {
    unsafe {
        bj_matrix_free(ptr::null_mut());
        bj_element_free(ptr::null_mut());
        bj_string_free(ptr::null_mut());
    }
}

#[test]
fn orthogonality_queries() {
    let e11 = matrix(2, 2, &[1.0, 0.0, 0.0, 0.0], None);
    let e12 = matrix(2, 2, &[0.0, 1.0, 0.0, 0.0], None);
    let wide = matrix(2, 3, &[0.0; 6], None);
    let mut v = BjVerdict { state: BjOrthogonality::Borderline, margin: 0.0 };
    unsafe {
        for method in [BjMethod::Criterion, BjMethod::Minimize] {
            assert_eq!(bj_check(e11, e12, method, &mut v), BjStatus::Ok);
            assert_eq!(v.state, BjOrthogonality::Orthogonal);
            assert_eq!(bj_check(e12, e12, method, &mut v), BjStatus::Ok);
            assert_eq!(v.state, BjOrthogonality::NotOrthogonal);
        }
        assert!(last_error().is_none());
        assert_eq!(bj_check(e11, wide, BjMethod::Criterion, &mut v), BjStatus::ShapeMismatch);
        let mut norm = 0.0;
        assert_eq!(bj_spectral_norm(e12, &mut norm), BjStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-14);
        let (mut mem, mut margin) = (BjMembership::Excludes, 0.0);
        assert_eq!(bj_zero_in_numrange(e12, &mut mem, &mut margin), BjStatus::Ok);
        assert_eq!(mem, BjMembership::Contains);
        assert!((margin - 0.5).abs() < 1e-9);
        assert_eq!(bj_zero_in_numrange(wide, &mut mem, &mut margin), BjStatus::ShapeMismatch);
        for m in [e11, e12, wide] {
            bj_matrix_free(m);
        }
    }
}

#[test]
fn algebra_elements() {
    let sizes = [1usize, 2];
    let a_re = [1.0, 0.5, 0.0, 0.0, 0.5];
    let b_re = [0.0, 1.0, 0.0, 0.0, 1.0];
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    let mut v = BjVerdict { state: BjOrthogonality::Borderline, margin: 0.0 };
    unsafe {
        assert_eq!(bj_element_new(2, sizes.as_ptr(), a_re.as_ptr(), ptr::null(), &mut a), BjStatus::Ok);
        assert_eq!(bj_element_new(2, sizes.as_ptr(), b_re.as_ptr(), ptr::null(), &mut b), BjStatus::Ok);
        assert_eq!(bj_check_alg(a, b, &mut v), BjStatus::Ok);
        assert_eq!(v.state, BjOrthogonality::Orthogonal);
        assert_eq!(bj_check_alg(b, a, &mut v), BjStatus::Ok);
        assert_eq!(v.state, BjOrthogonality::NotOrthogonal);
        let mut smooth = false;
        assert_eq!(bj_is_smooth(a, &mut smooth), BjStatus::Ok);
        assert!(smooth);
        let mut norm = 0.0;
        assert_eq!(bj_element_norm(b, &mut norm), BjStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-14);

        let mut json = ptr::null_mut();
        assert_eq!(bj_element_to_json(a, &mut json), BjStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(bj_element_from_json(json, &mut back), BjStatus::Ok);
        assert_eq!(bj_check_alg(back, b, &mut v), BjStatus::Ok);
        assert_eq!(v.state, BjOrthogonality::Orthogonal);
        bj_string_free(json);
        for e in [a, b, back] {
            bj_element_free(e);
        }
    }
}

#[test]
fn element_errors_map_to_status_codes() {
    let mut e = ptr::null_mut();
    let bad = CString::new(r#"{"shape":[2],"blocks":[[[1,0]]]}"#).unwrap();
    let garbage = CString::new("not json").unwrap();
    let zero = CString::new(r#"{"shape":[1],"blocks":[[[0,0]]]}"#).unwrap();
    let mut smooth = false;
    unsafe {
        assert_eq!(bj_element_from_json(garbage.as_ptr(), &mut e), BjStatus::Parse);
        assert_eq!(bj_element_from_json(bad.as_ptr(), &mut e), BjStatus::ShapeMismatch);
        assert_eq!(bj_element_new(1, [0usize].as_ptr(), [1.0].as_ptr(), ptr::null(), &mut e), BjStatus::ShapeMismatch);
        assert_eq!(bj_element_from_json(zero.as_ptr(), &mut e), BjStatus::Ok);
        assert_eq!(bj_is_smooth(e, &mut smooth), BjStatus::ZeroMatrix);
        bj_element_free(e);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(bj_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
