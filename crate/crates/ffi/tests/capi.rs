use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use diracbi_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = diracbi_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn emit(name: &str) -> CString {
    let mut out = ptr::null_mut();
    let s = unsafe { diracbi_zoo_emit(c(name).as_ptr(), &mut out) };
    assert_eq!(s, DiracbiStatus::Ok);
    let text = unsafe { CString::from(CStr::from_ptr(out)) };
    unsafe { diracbi_string_free(out) };
    text
}

fn parse(text: &CStr) -> *mut DiracbiInstance {
    let mut inst = ptr::null_mut();
    let s = unsafe { diracbi_instance_parse(text.as_ptr(), c("preset.inst").as_ptr(), &mut inst) };
    assert_eq!(s, DiracbiStatus::Ok);
    inst
}

fn check(inst: *const DiracbiInstance, suite: &str) -> (DiracbiStatus, *mut DiracbiReport) {
    let mut r = ptr::null_mut();
    let s = unsafe { diracbi_check(inst, c(suite).as_ptr(), 0, 4, 2, &mut r) };
    (s, r)
}

#[test]
fn positive_and_negative_reports() {
    for (preset, suite, passed) in [("presymplectic-dxdy", "im2form", 1), ("nonclosed-zdxdy", "im2form", 0)] {
        let inst = parse(&emit(preset));
        let (s, r) = check(inst, suite);
        assert_eq!(s, DiracbiStatus::Ok);
        unsafe {
            assert_eq!(diracbi_report_passed(r), passed);
            assert!(diracbi_report_len(r) > 0);
            let json = diracbi_report_render(r, 0);
            let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
            assert_eq!(v["schema"], 1);
            assert_eq!(v["trials"], 4);
            assert_eq!(v["checks"].as_array().unwrap().len(), diracbi_report_len(r));
            diracbi_string_free(json);
            let text = diracbi_report_render(r, 1);
            assert!(CStr::from_ptr(text).to_str().unwrap().contains("im2form.condition2"));
            diracbi_string_free(text);
            diracbi_report_free(r);
            diracbi_instance_free(inst);
        }
    }
}

#[test]
fn error_codes() {
    let mut inst = ptr::null_mut();
    let s = unsafe {
        diracbi_instance_parse(
            c("[patch]\ndim = 1\n[bundle.A]\nrank = 1\n[anchor.A]\nrow1 = x^\n").as_ptr(),
            ptr::null(),
            &mut inst,
        )
    };
    assert_eq!(s, DiracbiStatus::Instance);
    assert!(inst.is_null());
    assert!(last_error().starts_with("<instance>:6:"), "{}", last_error());

    let s = unsafe { diracbi_instance_parse(ptr::null(), ptr::null(), &mut inst) };
    assert_eq!(s, DiracbiStatus::NullPointer);
    let s = unsafe { diracbi_instance_parse(c("[patch]").as_ptr(), ptr::null(), ptr::null_mut()) };
    assert_eq!(s, DiracbiStatus::NullPointer);

    let bad = [0xffu8, 0];
    let s = unsafe { diracbi_instance_parse(bad.as_ptr().cast(), ptr::null(), &mut inst) };
    assert_eq!(s, DiracbiStatus::InvalidUtf8);

    let mut out = ptr::null_mut();
    let s = unsafe { diracbi_zoo_emit(c("nope").as_ptr(), &mut out) };
    assert_eq!(s, DiracbiStatus::UnknownName);
    assert!(out.is_null());
    assert!(last_error().contains("poisson-xy"));

    let inst = parse(&emit("aff1-bialgebra"));
    assert_eq!(check(inst, "nonsense").0, DiracbiStatus::UnknownName);
    let (s, r) = check(inst, "iis");
    assert_eq!(s, DiracbiStatus::Precondition);
    assert!(r.is_null());
    assert_eq!(check(ptr::null(), "all").0, DiracbiStatus::NullPointer);
    unsafe {
        assert_eq!(diracbi_report_passed(ptr::null()), -1);
        assert_eq!(diracbi_report_len(ptr::null()), 0);
        assert!(diracbi_report_render(ptr::null(), 0).is_null());
        diracbi_report_free(ptr::null_mut());
        diracbi_string_free(ptr::null_mut());
        diracbi_instance_free(inst);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(diracbi_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/diracbi.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct DiracbiInstance DiracbiInstance;",
        "typedef struct DiracbiReport DiracbiReport;",
        "DIRACBI_STATUS_OK = 0",
        "DIRACBI_STATUS_PANIC = 10",
        "diracbi_last_error(void)",
        "diracbi_instance_parse(",
        "diracbi_check(",
        "diracbi_report_render(",
        "diracbi_string_free(",
    ] {
        assert!(h.contains(name), "{name} missing from the header");
    }
}

#[test]
fn header_compiles_as_c_and_cxx() {
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let o = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(header())
            .output()
            .expect("a C compiler is installed");
        assert!(o.status.success(), "{cc}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
