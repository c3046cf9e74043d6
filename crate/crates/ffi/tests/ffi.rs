use std::ffi::{CStr, CString};
use std::ptr;

use lietype_ffi::*;

fn label(s: &str) -> *mut LtDatum {
    let c = CString::new(s).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { lt_datum_from_label(c.as_ptr(), &mut d) }, LtStatus::Ok);
    assert!(!d.is_null());
    d
}

fn last_code() -> String {
    let p = lt_last_error_code();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { lt_string_free(p) };
    s
}

#[test]
fn degrees_and_order() {
    let d = label("F4");
    let mut buf = [0u32; 8];
    let mut len = 0usize;
    assert_eq!(unsafe { lt_degrees(d, buf.as_mut_ptr(), buf.len(), &mut len) }, LtStatus::Ok);
    assert_eq!(&buf[..len], &[2, 6, 8, 12]);
    let mut small = [0u32; 2];
    assert_eq!(unsafe { lt_degrees(d, small.as_mut_ptr(), 2, &mut len) }, LtStatus::BufferTooSmall);
    assert_eq!(len, 4);
    let mut order = 0u64;
    assert_eq!(unsafe { lt_weyl_order(d, &mut order) }, LtStatus::Ok);
    assert_eq!(order, 1152);
    let mut rank = 0usize;
    assert_eq!(unsafe { lt_datum_rank(d, &mut rank) }, LtStatus::Ok);
    assert_eq!(rank, 4);
    unsafe { lt_datum_free(d) };
}

#[test]
fn json_round_trip() {
    let d = label("B3ad");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { lt_datum_to_json(d, &mut s) }, LtStatus::Ok);
    let text = take_string(s);
    let c = CString::new(text.clone()).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { lt_datum_from_json(c.as_ptr(), &mut e) }, LtStatus::Ok);
    let mut s2 = ptr::null_mut();
    assert_eq!(unsafe { lt_datum_to_json(e, &mut s2) }, LtStatus::Ok);
    assert_eq!(take_string(s2), text);
    unsafe {
        lt_datum_free(d);
        lt_datum_free(e);
    }
}

#[test]
fn triality_fixed_datum() {
    let d = label("D4");
    let tau = CString::new("diagram").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { lt_fixed_datum(d, tau.as_ptr(), 2, 0, &mut f) }, LtStatus::Ok);
    let mut buf = [0u32; 4];
    let mut len = 0;
    assert_eq!(unsafe { lt_degrees(f, buf.as_mut_ptr(), 4, &mut len) }, LtStatus::Ok);
    assert_eq!(&buf[..len], &[2, 6]);
    let mut v = LtVerdict::Unknown;
    assert_eq!(unsafe { lt_verdict(d, tau.as_ptr(), 2, 0, &mut v) }, LtStatus::Ok);
    assert_eq!(v, LtVerdict::GuaranteedThmExamples);
    unsafe {
        lt_datum_free(f);
        lt_datum_free(d);
    }
}

#[test]
fn untwist_and_tezuka_json() {
    let d = label("A2");
    let id = CString::new("id").unwrap();
    let q = CString::new("2").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { lt_untwist_json(d, id.as_ptr(), q.as_ptr(), 3, 6, &mut s) }, LtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(v["e"], 2);
    assert_eq!(v["valuation"], 1);
    assert_eq!(v["classification_key"]["fingerprint"]["degrees"], serde_json::json!([2]));
    let q4 = CString::new("4").unwrap();
    assert_eq!(unsafe { lt_tezuka_json(d, id.as_ptr(), q4.as_ptr(), 3, 6, 16, &mut s) }, LtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(v["consistent"], true);
    unsafe { lt_datum_free(d) };
}

#[test]
fn padic_functions() {
    let (mut e, mut z, mut qp) = (0u64, 0u64, 0u64);
    assert_eq!(unsafe { lt_padic_untwist(2, 3, 6, &mut e, &mut z, &mut qp) }, LtStatus::Ok);
    assert_eq!((e, z, qp), (2, 728, 727));
    let mut o = 0u64;
    assert_eq!(unsafe { lt_mult_order(2, 7, 4, &mut o) }, LtStatus::Ok);
    assert_eq!(o, 3);
    let mut v = 0i32;
    assert_eq!(unsafe { lt_unit_valuation(10, 3, 6, &mut v) }, LtStatus::Ok);
    assert_eq!(v, 2);
    assert_eq!(unsafe { lt_unit_valuation(1, 3, 6, &mut v) }, LtStatus::Ok);
    assert_eq!(v, -1);
    assert_eq!(unsafe { lt_mult_order(3, 3, 4, &mut o) }, LtStatus::InputError);
    assert_eq!(last_code(), "NOT_A_UNIT");
}

#[test]
fn collapse_check() {
    let degs = [2u32, 4];
    let mut ok = false;
    assert_eq!(unsafe { lt_em_collapse_check(degs.as_ptr(), 2, 20, 2, &mut ok) }, LtStatus::Ok);
    assert!(ok);
    assert_eq!(unsafe { lt_em_collapse_check(ptr::null(), 0, 5, 3, &mut ok) }, LtStatus::Ok);
    assert!(ok);
    let bad = [0u32];
    assert_eq!(unsafe { lt_em_collapse_check(bad.as_ptr(), 1, 5, 3, &mut ok) }, LtStatus::InputError);
}

#[test]
fn errors_are_reported() {
    let c = CString::new("Q7").unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { lt_datum_from_label(c.as_ptr(), &mut d) }, LtStatus::InputError);
    assert!(d.is_null());
    assert_eq!(last_code(), "INVALID_TYPE");
    assert_eq!(unsafe { lt_datum_from_label(ptr::null(), &mut d) }, LtStatus::NullPointer);
    let bytes = [0xffu8, 0];
    assert_eq!(unsafe { lt_datum_from_label(bytes.as_ptr().cast(), &mut d) }, LtStatus::InvalidUtf8);
    let e8 = label("E8");
    let tau = CString::new("psi:-1").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { lt_fixed_datum(e8, tau.as_ptr(), 3, 0, &mut f) }, LtStatus::CapExceeded);
    assert_eq!(last_code(), "CAP_EXCEEDED");
    let mut ok = LtVerdict::Unknown;
    assert_eq!(unsafe { lt_verdict(e8, c"id".as_ptr(), 2, 0, &mut ok) }, LtStatus::Ok);
    assert!(lt_last_error_code().is_null());
    unsafe {
        lt_datum_free(e8);
        lt_datum_free(ptr::null_mut());
        lt_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_current_and_compiles() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/lietype.h")).unwrap();
    for f in ["lt_datum_from_label", "lt_untwist_json", "lt_em_collapse_check", "lt_last_error_code"] {
        assert!(header.contains(f), "{f} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(dir.join("include/lietype.h"))
        .status()
    else {
        return;
    };
    assert!(status.success());
}
