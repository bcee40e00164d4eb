use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sturmlab_ffi::*;

fn last_error() -> String {
    unsafe {
        let mut needed = 0usize;
        let _ = sturmlab_last_error(ptr::null_mut(), 0, &mut needed);
        let mut buf = vec![0 as c_char; needed];
        assert_eq!(sturmlab_last_error(buf.as_mut_ptr(), buf.len(), ptr::null_mut()), SturmlabStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn roy(a: u64, b: u64, c: u64) -> *mut SturmlabApprox {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(sturmlab_approx_new_roy(a, b, c, ptr::null(), 0, &mut h), SturmlabStatus::Ok);
        h
    }
}

fn read_string(f: impl Fn(*mut c_char, usize, *mut usize) -> SturmlabStatus) -> String {
    let mut needed = 0usize;
    assert_eq!(f(ptr::null_mut(), 0, &mut needed), SturmlabStatus::BufferTooSmall);
    let mut buf = vec![0 as c_char; needed];
    assert_eq!(f(buf.as_mut_ptr(), buf.len(), &mut needed), SturmlabStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn roy_handle_round_trip() {
    unsafe {
        let h = roy(2, 1, 2);
        let y = read_string(|b, l, n| sturmlab_y(h, 0, b, l, n));
        assert_eq!(y, "(1, -2, -4)");
        let mut ok = false;
        assert_eq!(sturmlab_verify(h, 10, &mut ok), SturmlabStatus::Ok);
        assert!(ok);
        let (mut d, mut z) = (0.0, true);
        assert_eq!(sturmlab_delta(h, 18, &mut d, &mut z), SturmlabStatus::Ok);
        assert!(!z && d > 2f64.ln() / 12f64.ln() && d < 0.5);
        sturmlab_approx_free(h);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(sturmlab_approx_new_roy(1, 1, 2, ptr::null(), 0, &mut h), SturmlabStatus::BadRoyTriple);
        assert!(h.is_null());
        assert!(last_error().contains("Roy"));
        assert_eq!(sturmlab_approx_new_bl(2, 2, 1, ptr::null(), 0, &mut h), SturmlabStatus::EqualLetters);
        let bad = CString::new("period=[x]").unwrap();
        assert_eq!(sturmlab_approx_new_roy(2, 1, 2, bad.as_ptr(), 0, &mut h), SturmlabStatus::Parse);
        let mut ok = false;
        assert_eq!(sturmlab_verify(ptr::null_mut(), 4, &mut ok), SturmlabStatus::NullPointer);
        let name = CStr::from_ptr(sturmlab_status_name(SturmlabStatus::FibonacciOnly));
        assert_eq!(name.to_str().unwrap(), "all-ones program only");
        assert!(!CStr::from_ptr(sturmlab_version()).to_bytes().is_empty());
        sturmlab_approx_free(ptr::null_mut());
    }
}

#[test]
fn bl_system_and_xi() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(sturmlab_approx_new_bl(1, 2, 1, ptr::null(), 256, &mut h), SturmlabStatus::Ok);
        let xi = read_string(|b, l, n| sturmlab_xi_digits(h, 30, b, l, n));
        assert!(xi.starts_with("0.720484667632132530883536908286"), "{xi}");
        let mut s = ptr::null_mut();
        assert_eq!(sturmlab_system_new(h, 3, 8, f64::NAN, &mut s), SturmlabStatus::Ok);
        let mut valid = false;
        assert_eq!(sturmlab_system_validate(s, 1e-9, &mut valid), SturmlabStatus::Ok);
        assert!(valid);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(sturmlab_system_span(s, &mut lo, &mut hi), SturmlabStatus::Ok);
        let q = 0.5 * (lo + hi);
        let mut p = [0.0f64; 3];
        assert_eq!(sturmlab_system_eval(s, q, p.as_mut_ptr()), SturmlabStatus::Ok);
        assert!((p.iter().sum::<f64>() - q).abs() < 1e-9 && p[0] <= p[1] && p[1] <= p[2]);
        assert_eq!(sturmlab_system_eval(s, hi + 1e6, p.as_mut_ptr()), SturmlabStatus::OutOfRange);
        sturmlab_system_free(s);

        let mut forced = ptr::null_mut();
        assert_eq!(sturmlab_system_new(h, 3, 8, 0.5, &mut forced), SturmlabStatus::Ok);
        assert_eq!(sturmlab_system_validate(forced, 1e-9, &mut valid), SturmlabStatus::Ok);
        assert!(!valid);
        assert!(last_error().contains("not a 3-system"));
        sturmlab_system_free(forced);
        sturmlab_approx_free(h);
    }
}

#[test]
fn closed_forms() {
    unsafe {
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        let mut e = SturmlabExponents::default();
        assert_eq!(sturmlab_exponents(1.0 / g, 0.0, 1.0 / g, f64::INFINITY, &mut e), SturmlabStatus::Ok);
        assert!((e.omega2_hat[0] - g * g).abs() < 1e-12 && e.omega2_hat[0] == e.omega2_hat[1]);
        assert!((e.lambda2_hat[0] - 1.0 / g).abs() < 1e-12);
        assert_eq!(sturmlab_exponents(1.0 / g, 0.45, 1.0 / g, f64::INFINITY, &mut e), SturmlabStatus::ImproperDelta);
        assert_eq!(sturmlab_exponents(f64::NAN, 0.0, 0.5, 1.0, &mut e), SturmlabStatus::InvalidArgument);
    }
}

#[test]
fn header_is_valid_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/sturmlab.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for f in ["sturmlab_approx_new_roy", "sturmlab_system_eval", "sturmlab_last_error", "STURMLAB_STATUS_IMPROPER_DELTA"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let src = std::env::temp_dir().join(format!("sturmlab_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"sturmlab.h\"\nint main(void) {\n  SturmlabApprox *h = 0;\n  SturmlabStatus s = sturmlab_approx_new_roy(2, 1, 2, 0, 0, &h);\n  double p[3];\n  (void)p;\n  sturmlab_approx_free(h);\n  return s == STURMLAB_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    let out = match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(dir.join("include")).arg(&src).output() {
        Ok(o) => o,
        Err(_) => return,
    };
    let _ = std::fs::remove_file(&src);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
