use std::ffi::{c_char, CString};
use std::ptr;

use rootldpc_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let len = unsafe { rldpc_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..len.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn root_code_round_trip() {
    let mut code = ptr::null_mut();
    assert_eq!(unsafe { rldpc_code_root_regular(400, 3, &mut code) }, RldpcStatus::Ok);
    let (mut n, mut m, mut rank) = (0, 0, 0);
    assert_eq!(unsafe { rldpc_code_dimensions(code, &mut n, &mut m, &mut rank) }, RldpcStatus::Ok);
    assert_eq!((n, m), (400, 200));
    assert!(rank <= m);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("root.alist").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { rldpc_code_write_alist(code, path.as_ptr()) }, RldpcStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { rldpc_code_read_alist(path.as_ptr(), &mut again) }, RldpcStatus::Ok);
    let mut n2 = 0;
    assert_eq!(unsafe { rldpc_code_dimensions(again, &mut n2, ptr::null_mut(), ptr::null_mut()) }, RldpcStatus::Ok);
    assert_eq!(n2, 400);
    unsafe {
        rldpc_code_free(code);
        rldpc_code_free(again);
    }
}

#[test]
fn wstar2_diversity() {
    let mut code = ptr::null_mut();
    assert_eq!(unsafe { rldpc_code_wstar2(12, &mut code) }, RldpcStatus::Ok);
    let (mut d, mut w) = (0usize, 0i64);
    assert_eq!(unsafe { rldpc_code_diversity(code, 2, &mut d, &mut w) }, RldpcStatus::Ok);
    assert_eq!((d, w), (2, 2));
    unsafe { rldpc_code_free(code) };
}

#[test]
fn decoder_corrects_noiseless_word() {
    let mut code = ptr::null_mut();
    assert_eq!(unsafe { rldpc_code_root_regular(64, 1, &mut code) }, RldpcStatus::Ok);
    let mut dec = ptr::null_mut();
    assert_eq!(unsafe { rldpc_decoder_new(code, RldpcVariant::MinSum, 20, &mut dec) }, RldpcStatus::Ok);
    let mut llr = vec![4.0; 64];
    llr[5] = -1.0;
    let mut bits = vec![9u8; 64];
    let mut converged = false;
    let mut iterations = 0;
    let s = unsafe { rldpc_decoder_decode(dec, llr.as_ptr(), 64, bits.as_mut_ptr(), &mut converged, &mut iterations) };
    assert_eq!(s, RldpcStatus::Ok);
    assert!(converged);
    assert!(bits.iter().all(|&b| b == 0));

    let s = unsafe { rldpc_decoder_decode(dec, llr.as_ptr(), 10, bits.as_mut_ptr(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(s, RldpcStatus::Dimension);
    assert!(last_error().contains("64"));
    unsafe {
        rldpc_decoder_free(dec);
        rldpc_code_free(code);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut code = ptr::null_mut();
    assert_eq!(unsafe { rldpc_code_root_regular(10, 1, &mut code) }, RldpcStatus::Dimension);
    assert!(code.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { rldpc_code_root_regular(16, 1, ptr::null_mut()) }, RldpcStatus::NullPointer);
    assert_eq!(last_error(), "out is null");

    let missing = CString::new("/nonexistent/h.alist").unwrap();
    assert_eq!(unsafe { rldpc_code_read_alist(missing.as_ptr(), &mut code) }, RldpcStatus::Io);

    let mut p = 0.0;
    assert_eq!(unsafe { rldpc_outage_probability(10.0, 0.5, 0, 10, 1, &mut p) }, RldpcStatus::InvalidArgument);
    unsafe {
        rldpc_code_free(ptr::null_mut());
        rldpc_decoder_free(ptr::null_mut());
    }
}

#[test]
fn last_error_truncates() {
    unsafe { rldpc_code_root_regular(16, 1, ptr::null_mut()) };
    let mut buf = [0 as c_char; 4];
    let len = unsafe { rldpc_last_error(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(len, "out is null".len());
    assert_eq!(buf[3], 0);
    assert_eq!(unsafe { rldpc_last_error(ptr::null_mut(), 0) }, len);
}

#[test]
fn numeric_entry_points() {
    let mut p = 0.0;
    assert_eq!(unsafe { rldpc_outage_probability(10.0, 0.5, 2, 200_000, 7, &mut p) }, RldpcStatus::Ok);
    assert!((0.025..0.037).contains(&p), "{p}");
    let mut t = 0.0;
    assert_eq!(unsafe { rldpc_awgn_threshold(RldpcEnsemble::Random, 3, 6, 0.02, &mut t) }, RldpcStatus::Ok);
    assert!((t - 1.1).abs() < 0.1, "{t}");
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rootldpc.h")).unwrap();
    for name in ["rldpc_code_root_regular", "rldpc_decoder_decode", "rldpc_last_error", "RLDPC_STATUS_OK", "typedef struct RldpcCode RldpcCode"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
