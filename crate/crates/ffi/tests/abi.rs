use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hankellab_ffi::*;

fn last_error() -> String {
    let p = hl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn scalar(coeffs: &[f64]) -> *mut HlSymbol {
    let mut interleaved = Vec::new();
    for &c in coeffs {
        interleaved.extend([c, 0.0]);
    }
    let mut out = ptr::null_mut();
    assert_eq!(
        hl_symbol_new(1, coeffs.len() - 1, interleaved.as_ptr(), &mut out),
        HlStatus::Ok
    );
    out
}

#[test]
fn symbol_lifecycle_and_queries() {
    unsafe {
        let z = scalar(&[0.0, 1.0]);
        assert_eq!((hl_symbol_dim(z), hl_symbol_degree(z)), (1, 1));
        let mut b = 0.0;
        assert_eq!(hl_bloch_norm(z, &mut b), HlStatus::Ok);
        assert!((b - 4.0 * 3f64.sqrt() / 9.0).abs() < 1e-6);
        let (mut adj, mut leib) = (1.0, 1.0);
        assert_eq!(hl_adjoint_residual(z, 1.0, 5, &mut adj), HlStatus::Ok);
        assert_eq!(hl_leibniz_residual(z, 5, &mut leib), HlStatus::Ok);
        assert!(adj <= 1e-12 && leib <= 1e-12);
        let mut g = 0.0;
        assert_eq!(hl_gram_embedding(z, 4, &mut g), HlStatus::Ok);
        assert!(g > 0.0);
        hl_symbol_free(z);
        hl_symbol_free(ptr::null_mut());
    }
}

#[test]
fn norm_chain_of_zero_and_json_input() {
    unsafe {
        let json = CString::new(r#"{"dim":1,"degree":0,"coeffs":[[[[0,0]]]]}"#).unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(hl_symbol_from_json(json.as_ptr(), &mut s), HlStatus::Ok);
        let mut values = [1.0; 6];
        assert_eq!(hl_norm_chain(s, 1.0, 0, values.as_mut_ptr()), HlStatus::Ok);
        assert_eq!(values, [0.0; 6]);
        hl_symbol_free(s);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut out = ptr::null_mut();
        let json = CString::new(r#"{"dim":2,"degree":0,"coeffs":[[[[1,0]]]]}"#).unwrap();
        assert_eq!(
            hl_symbol_from_json(json.as_ptr(), &mut out),
            HlStatus::DimensionMismatch
        );
        assert!(last_error().contains("dimension"));
        let json = CString::new("{").unwrap();
        assert_eq!(hl_symbol_from_json(json.as_ptr(), &mut out), HlStatus::Format);
        assert_eq!(hl_symbol_from_json(ptr::null(), &mut out), HlStatus::NullPointer);

        let c = scalar(&[2.0]);
        let mut v = 0.0;
        assert_eq!(
            hl_norm_chain(c, -1.0, 0, [0.0; 6].as_mut_ptr()),
            HlStatus::InvalidArgument
        );
        assert_eq!(hl_bloch_norm(c, ptr::null_mut()), HlStatus::NullPointer);
        assert_eq!(hl_bloch_norm(ptr::null(), &mut v), HlStatus::NullPointer);
        assert_eq!(hl_bloch_norm(c, &mut v), HlStatus::Ok);
        assert!(hl_last_error_message().is_null());
        hl_symbol_free(c);
    }
}

#[test]
fn dp1_through_the_abi() {
    unsafe {
        let (mut l, mut r) = (0.0, 0.0);
        assert_eq!(hl_dp1_section_norms(1.0, 0, &mut l, &mut r), HlStatus::Ok);
        assert!((l - 1.0).abs() < 1e-14 && (r - 1.0).abs() < 1e-14);
        assert_eq!(hl_dp1_section_norms(1.0, 63, &mut l, &mut r), HlStatus::Ok);
        assert!(r < 1.0964 && l * l >= (1..=64).map(|k| 1.0 / k as f64).sum::<f64>());
        assert_eq!(hl_dp1_section_norms(0.0, 3, &mut l, &mut r), HlStatus::InvalidArgument);
    }
    let v = unsafe { CStr::from_ptr(hl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_compiles() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include").join("hankellab.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for f in [
        "hl_symbol_new",
        "hl_norm_chain",
        "hl_last_error_message",
        "HL_STATUS_PANIC",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let probe = std::env::temp_dir().join(format!("hankellab_probe_{}.c", std::process::id()));
    std::fs::write(
        &probe,
        "#include \"hankellab.h\"\nint main(void) { HlSymbol *s = 0; double v; return hl_bloch_norm(s, &v) == HL_STATUS_NULL_POINTER ? 0 : 1; }\n",
    )
    .unwrap();
    for compiler in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler.0)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", compiler.1])
            .arg("-I")
            .arg(header.parent().unwrap())
            .arg(&probe)
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{} rejected the header", compiler.0),
            Err(_) => eprintln!("{} not available; syntax check skipped", compiler.0),
        }
    }
    let _ = std::fs::remove_file(probe);
}
