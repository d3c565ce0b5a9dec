use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qpvar_ffi::*;

const E1: &str = r#"{"points":["a","b"],"d":[["0","1"],["0","0"]]}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    qpv_string_free(p);
    s
}

fn last_error() -> String {
    let p = qpv_last_error();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p).to_string_lossy().into_owned() }
    }
}

struct Handles {
    space: *mut QpvSpace,
    phi: *mut QpvObjective,
}

impl Handles {
    fn new(space: &str, phi: &str) -> Self {
        let mut s = ptr::null_mut();
        let mut f = ptr::null_mut();
        unsafe {
            assert_eq!(qpv_space_from_json(c(space).as_ptr(), &mut s), QpvStatus::Ok);
            assert_eq!(qpv_objective_from_json(s, c(phi).as_ptr(), &mut f), QpvStatus::Ok);
        }
        Handles { space: s, phi: f }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            qpv_objective_free(self.phi);
            qpv_space_free(self.space);
        }
    }
}

#[test]
fn validate_reports_flags() {
    let mut v = QpvValidation::default();
    unsafe {
        assert_eq!(qpv_validate(c(E1).as_ptr(), &mut v), QpvStatus::Ok);
    }
    assert_eq!(v, QpvValidation { qm1: true, qm2: true, qm3: true, t1: false });

    let bad = r#"{"points":["a","b","c"],"d":[["0","1","5"],["1","0","1"],["1","1","0"]]}"#;
    unsafe {
        assert_eq!(qpv_validate(c(bad).as_ptr(), &mut v), QpvStatus::Ok);
        assert!(!v.qm2);
        let mut s = ptr::null_mut();
        assert_eq!(qpv_space_from_json(c(bad).as_ptr(), &mut s), QpvStatus::InvalidSpace);
        assert!(s.is_null());
    }
}

#[test]
fn weak_certificate_round_trips_through_verify() {
    let h = Handles::new(E1, r#"{"phi":{"a":"1","b":"0"}}"#);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(qpv_ekeland_weak(h.space, h.phi, &mut out), QpvStatus::Ok);
        let cert = take(out);
        let v: serde_json::Value = serde_json::from_str(&cert).unwrap();
        assert_eq!(v["principle"], "weak-ekeland");
        assert_eq!(v["z"], "b");

        let mut report = ptr::null_mut();
        assert_eq!(qpv_verify(h.space, h.phi, c(&cert).as_ptr(), &mut report), QpvStatus::Ok);
        assert!(take(report).contains("\"valid\":true"));

        let forged = cert.replacen("\"z\":\"b\"", "\"z\":\"a\"", 1);
        let mut report = ptr::null_mut();
        assert_eq!(qpv_verify(h.space, h.phi, c(&forged).as_ptr(), &mut report), QpvStatus::VerifyFailed);
        assert!(take(report).contains("\"valid\":false"));
    }
}

#[test]
fn full_ekeland_rejects_zero_lambda() {
    let h = Handles::new(E1, r#"{"phi":{"a":"1","b":"0"}}"#);
    unsafe {
        let mut out = ptr::null_mut();
        let status = qpv_ekeland_full(
            h.space,
            h.phi,
            c("1").as_ptr(),
            c("0").as_ptr(),
            c("a").as_ptr(),
            &mut out,
        );
        assert_eq!(status, QpvStatus::Precondition);
        assert!(out.is_null());
        assert_eq!(last_error(), "lambda must be positive");

        let status = qpv_ekeland_full(
            h.space,
            h.phi,
            c("1").as_ptr(),
            c("1").as_ptr(),
            c("a").as_ptr(),
            &mut out,
        );
        assert_eq!(status, QpvStatus::Ok);
        assert!(take(out).contains("\"principle\":\"full-ekeland\""));
        assert!(qpv_last_error().is_null());
    }
}

#[test]
fn takahashi_violation_still_returns_certificate() {
    let e2 = r#"{"points":["a","b"],"d":[["0","1"],["1","0"]]}"#;
    let h = Handles::new(e2, r#"{"phi":{"a":"0","b":"1/2"}}"#);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(qpv_takahashi(h.space, h.phi, &mut out), QpvStatus::HypothesisViolated);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["evidence"]["witness"], "b");
    }
}

#[test]
fn caristi_and_equivalence() {
    let h = Handles::new(E1, r#"{"phi":{"a":"1","b":"0"}}"#);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(qpv_caristi(h.space, h.phi, c(r#"{"a":"b","b":"b"}"#).as_ptr(), &mut out), QpvStatus::Ok);
        assert!(take(out).contains("\"z\":\"b\""));
        assert_eq!(
            qpv_caristi(h.space, h.phi, c(r#"{"a":"a"}"#).as_ptr(), &mut out),
            QpvStatus::Precondition
        );
        assert_eq!(qpv_equivalence(h.space, h.phi, &mut out), QpvStatus::Ok);
        assert!(take(out).contains("weak-ekeland"));
    }
}

#[test]
fn null_and_malformed_arguments() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(qpv_space_from_json(ptr::null(), &mut s), QpvStatus::NullArgument);
        assert_eq!(qpv_space_from_json(c("{").as_ptr(), &mut s), QpvStatus::Malformed);
        assert!(!last_error().is_empty());
        let mut out = ptr::null_mut();
        assert_eq!(qpv_ekeland_weak(ptr::null(), ptr::null(), &mut out), QpvStatus::NullArgument);
        assert_eq!(qpv_space_len(ptr::null()), 0);
        qpv_space_free(ptr::null_mut());
        qpv_string_free(ptr::null_mut());
    }
}

#[test]
fn objective_from_other_space_is_refused() {
    let small = Handles::new(E1, r#"{"phi":{"a":"1","b":"0"}}"#);
    let one = Handles::new(r#"{"points":["p"],"d":[["0"]]}"#, r#"{"phi":{"p":"0"}}"#);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(qpv_ekeland_weak(small.space, one.phi, &mut out), QpvStatus::Malformed);
    }
}

#[test]
fn incomplete_demo_phi_table() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(qpv_incomplete_demo(3, &mut out), QpvStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["phi"], serde_json::json!({"x1": "1", "x2": "1/2", "x3": "1/4"}));
        assert_eq!(qpv_incomplete_demo(1, &mut out), QpvStatus::Precondition);
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qpvar.h")).unwrap();
    for name in [
        "qpv_space_from_json",
        "qpv_objective_from_json",
        "qpv_validate",
        "qpv_ekeland_weak",
        "qpv_ekeland_full",
        "qpv_takahashi",
        "qpv_caristi",
        "qpv_equivalence",
        "qpv_verify",
        "qpv_incomplete_demo",
        "qpv_string_free",
        "qpv_last_error",
        "typedef struct QpvSpace QpvSpace",
        "QPV_STATUS_PRECONDITION = 5",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles the C smoke program against the header and static library.
/// Skipped when no C compiler or no static archive is around.
#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libqpvar_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no cc or {} missing", lib.display());
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::temp_dir().join(format!("qpvar-ffi-smoke-{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "smoke.c exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
