//! C ABI over the certification engine.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns a
//! [`DiracbiStatus`]; on failure the message is available from
//! [`diracbi_last_error`] on the same thread until the next failing call.
//! Strings returned by the library are released with
//! [`diracbi_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use diracbi::cli::{emit, parse_instance, run_suite, Instance, Report, SUITES};
use diracbi::sampling::CheckConfig;
use diracbi::zoo::preset;
use diracbi::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiracbiStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not UTF-8.
    InvalidUtf8 = 2,
    /// An expression failed to parse.
    Syntax = 3,
    /// Shapes of declared objects disagree.
    Shape = 4,
    /// The instance text is ill-formed; the message carries line and column.
    Instance = 5,
    /// Inputs violate a precondition, or nothing applies.
    Precondition = 6,
    /// Unknown suite or preset name.
    UnknownName = 7,
    /// A frame or certificate lost rank.
    RankDrop = 8,
    /// Arithmetic failure: division by zero or a pole.
    Arithmetic = 9,
    /// The library panicked; this is a bug.
    Panic = 10,
}

/// A validated instance file.
pub struct DiracbiInstance(Instance);

/// The report of a check suite.
pub struct DiracbiReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DiracbiStatus {
    match e {
        Error::Syntax { .. } | Error::UnknownIdentifier { .. } => DiracbiStatus::Syntax,
        Error::Shape(_) | Error::PatchMismatch(_) => DiracbiStatus::Shape,
        Error::Instance { .. } | Error::Io(_) => DiracbiStatus::Instance,
        Error::Precondition(_) => DiracbiStatus::Precondition,
        Error::RankDrop(_) => DiracbiStatus::RankDrop,
        Error::DivisionByZero | Error::Pole { .. } => DiracbiStatus::Arithmetic,
    }
}

fn fail(status: DiracbiStatus, msg: &str) -> DiracbiStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (DiracbiStatus, String)>) -> DiracbiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiracbiStatus::Ok,
        Ok(Err((s, m))) => fail(s, &m),
        Err(_) => fail(DiracbiStatus::Panic, "internal panic"),
    }
}

fn lib_err(e: Error) -> (DiracbiStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DiracbiStatus, String)> {
    if p.is_null() {
        return Err((DiracbiStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (DiracbiStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn out_arg<T>(p: *mut T, what: &str) -> Result<(), (DiracbiStatus, String)> {
    if p.is_null() {
        return Err((DiracbiStatus::NullPointer, format!("{what} is null")));
    }
    Ok(())
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior nuls were replaced")
        .into_raw()
}

/// The message of the last failing call on this thread, or null. The
/// pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn diracbi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// The library version as a static string.
#[no_mangle]
pub extern "C" fn diracbi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses instance text. `file` names the source in diagnostics and may be
/// null.
///
/// # Safety
/// `text` and `file` must be null or nul-terminated strings; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diracbi_instance_parse(
    text: *const c_char,
    file: *const c_char,
    out: *mut *mut DiracbiInstance,
) -> DiracbiStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let file = if file.is_null() {
            "<instance>"
        } else {
            str_arg(file, "file")?
        };
        let inst = parse_instance(file, text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DiracbiInstance(inst)));
        Ok(())
    })
}

/// Releases an instance; null is ignored.
///
/// # Safety
/// `inst` must be null or a handle from [`diracbi_instance_parse`] that was
/// not yet released.
#[no_mangle]
pub unsafe extern "C" fn diracbi_instance_free(inst: *mut DiracbiInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Instance text of a named example.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diracbi_zoo_emit(name: *const c_char, out: *mut *mut c_char) -> DiracbiStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let name = str_arg(name, "name")?;
        let z = preset(name).map_err(|e| (DiracbiStatus::UnknownName, e.to_string()))?;
        *out = to_c(emit(&z));
        Ok(())
    })
}

/// Runs a check suite with the given seed, trial count and degree bound.
///
/// # Safety
/// `inst` must be a live handle, `suite` a nul-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diracbi_check(
    inst: *const DiracbiInstance,
    suite: *const c_char,
    seed: u64,
    trials: usize,
    max_degree: u32,
    out: *mut *mut DiracbiReport,
) -> DiracbiStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        if inst.is_null() {
            return Err((DiracbiStatus::NullPointer, "inst is null".into()));
        }
        let suite = str_arg(suite, "suite")?;
        if !SUITES.contains(&suite) {
            return Err((
                DiracbiStatus::UnknownName,
                format!("unknown suite `{suite}`; known: {}", SUITES.join(", ")),
            ));
        }
        let cfg = CheckConfig {
            seed,
            trials,
            max_degree,
        };
        let r = run_suite(&(*inst).0, suite, &cfg).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DiracbiReport(r)));
        Ok(())
    })
}

/// 1 when every check passed, 0 otherwise, -1 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diracbi_report_passed(report: *const DiracbiReport) -> c_int {
    match report.as_ref() {
        Some(r) => c_int::from(r.0.passed()),
        None => -1,
    }
}

/// Number of checks in the report; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diracbi_report_len(report: *const DiracbiReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.checks.len())
}

/// The report as JSON, or as text when `text` is nonzero; release with
/// [`diracbi_string_free`]. Null for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diracbi_report_render(report: *const DiracbiReport, text: c_int) -> *mut c_char {
    match report.as_ref() {
        Some(r) if text != 0 => to_c(r.0.to_text()),
        Some(r) => to_c(r.0.to_json()),
        None => ptr::null_mut(),
    }
}

/// Releases a report; null is ignored.
///
/// # Safety
/// `report` must be null or a handle from [`diracbi_check`] that was not
/// yet released.
#[no_mangle]
pub unsafe extern "C" fn diracbi_report_free(report: *mut DiracbiReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that was not yet
/// released.
#[no_mangle]
pub unsafe extern "C" fn diracbi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
