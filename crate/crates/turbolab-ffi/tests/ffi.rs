//! Exercise the C ABI from Rust the way a foreign caller would.

use std::ffi::{CStr, CString};
use turbolab_ffi::*;

const REP3: &str = r#"{"letter_dim":1,"z_basis":[],"n":3,"k":1,"m":0,
  "matrix":["100","110","101"]}"#;
const SEED_R: &str = r#"{"letter_dim":1,"z_basis":[],"n":1,"k":1,"m":1,
  "matrix":["10","11"]}"#;

fn load(json: &str) -> *mut TlEncoder {
    let c = CString::new(json).unwrap();
    let mut h: *mut TlEncoder = std::ptr::null_mut();
    let status = unsafe { tl_encoder_from_json(c.as_ptr(), &mut h) };
    assert_eq!(status, TlStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn encoder_lifecycle_and_info() {
    let h = load(REP3);
    let mut info = TlEncoderInfo {
        letter_dim: 0,
        n: 0,
        k: 0,
        s: 0,
        m: 0,
        has_block_view: 0,
    };
    assert_eq!(unsafe { tl_encoder_info(h, &mut info) }, TlStatus::Ok);
    assert_eq!((info.n, info.k, info.m), (3, 1, 0));
    assert_eq!(info.has_block_view, 1);
    unsafe { tl_encoder_free(h) };
}

#[test]
fn parse_error_sets_message() {
    let c = CString::new("{ not json").unwrap();
    let mut h: *mut TlEncoder = std::ptr::null_mut();
    let status = unsafe { tl_encoder_from_json(c.as_ptr(), &mut h) };
    assert_eq!(status, TlStatus::ParseError);
    let msg = unsafe { CStr::from_ptr(tl_last_error()) };
    assert!(!msg.to_str().unwrap().is_empty());
}

#[test]
fn singular_matrix_rejected() {
    let bad = r#"{"letter_dim":1,"z_basis":[],"n":2,"k":1,"m":0,"matrix":["11","11"]}"#;
    let c = CString::new(bad).unwrap();
    let mut h: *mut TlEncoder = std::ptr::null_mut();
    let status = unsafe { tl_encoder_from_json(c.as_ptr(), &mut h) };
    assert_ne!(status, TlStatus::Ok);
}

#[test]
fn distances_of_rep3() {
    let h = load(REP3);
    let (mut dc, mut dq) = (0u64, 0u64);
    assert_eq!(unsafe { tl_distances(h, &mut dc, &mut dq) }, TlStatus::Ok);
    assert_eq!((dc, dq), (3, 3));
    unsafe { tl_encoder_free(h) };
}

#[test]
fn classify_json_fields() {
    let h = load(SEED_R);
    let mut json: *mut std::ffi::c_char = std::ptr::null_mut();
    assert_eq!(unsafe { tl_classify_json(h, 4, &mut json) }, TlStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { tl_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["recursive"], true);
    assert_eq!(v["totally_recursive"], false);
    assert_eq!(v["systematic"], "falsified");
    assert_eq!(v["eta"], 1);
    unsafe { tl_encoder_free(h) };
}

#[test]
fn spectrum_csv_matches_library() {
    let h = load(SEED_R);
    let mut csv: *mut std::ffi::c_char = std::ptr::null_mut();
    assert_eq!(
        unsafe { tl_inner_spectrum_csv(h, 2, 3, 4, 0, &mut csv) },
        TlStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_string();
    unsafe { tl_string_free(csv) };
    assert!(text.contains("2,1,2"), "{text}");
    unsafe { tl_encoder_free(h) };
}

#[test]
fn turbo_distance_and_mc() {
    let outer = load(REP3);
    let inner = load(SEED_R);
    let mut d = 0u64;
    assert_eq!(
        unsafe { tl_turbo_distance(outer, inner, 2, 7, &mut d) },
        TlStatus::Ok
    );
    assert!(d >= 1);
    // reproducible under the same interleaver seed
    let mut d2 = 0u64;
    assert_eq!(
        unsafe { tl_turbo_distance(outer, inner, 2, 7, &mut d2) },
        TlStatus::Ok
    );
    assert_eq!(d, d2);
    let mut json: *mut std::ffi::c_char = std::ptr::null_mut();
    assert_eq!(
        unsafe { tl_mc_summary_json(outer, inner, 2, 5, 11, &mut json) },
        TlStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { tl_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["trials"], 5);
    unsafe { tl_encoder_free(outer) };
    unsafe { tl_encoder_free(inner) };
}

#[test]
fn llog_verdicts() {
    let mut v = TlLlogVerdict::Fails;
    assert_eq!(unsafe { tl_llog_check(1, 1, 16, &mut v) }, TlStatus::Ok);
    assert_eq!(v, TlLlogVerdict::Holds);
    assert_eq!(unsafe { tl_llog_check(1, 1, 10, &mut v) }, TlStatus::Ok);
    assert_eq!(v, TlLlogVerdict::NotApplicable);
    assert_eq!(
        unsafe { tl_llog_check(1, 0, 16, &mut v) },
        TlStatus::InvalidArgument
    );
}

#[test]
fn generated_header_exists_and_covers_the_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/turbolab.h");
    let text = std::fs::read_to_string(header).expect("header generated at build time");
    for symbol in [
        "tl_encoder_from_json",
        "tl_encoder_free",
        "tl_encoder_info",
        "tl_classify_json",
        "tl_distances",
        "tl_inner_spectrum_csv",
        "tl_turbo_distance",
        "tl_mc_summary_json",
        "tl_llog_check",
        "tl_string_free",
        "tl_last_error",
        "TlStatus",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
}
