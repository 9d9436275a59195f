//! C ABI for the verification suites.
//!
//! The interface is handle-based: suite runners return an opaque
//! `ZzReport*` through an out-parameter and a status code; accessors turn a
//! report into JSON or a pass/fail flag.  Strings returned by this library
//! must be released with [`zz_string_free`], reports with
//! [`zz_report_free`].  All functions are panic-safe: a panic inside the
//! library is caught and surfaced as `ZZ_ERR_PANIC`.
//!
//! The generated header is `include/zigzag.h`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use zigzag_core::report::{
    run_cohomology, run_verify_pathspace, run_verify_zigzag, sign_convention_digest, Report,
    SuiteConfig,
};

/// Opaque report handle.
pub struct ZzReport {
    inner: Report,
}

/// Status codes returned by the suite runners.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ZzStatus {
    /// Success.
    ZzOk = 0,
    /// A required pointer argument was null.
    ZzErrNullArg = 1,
    /// The configuration string failed to parse or validate.
    ZzErrInvalidConfig = 2,
    /// The configuration string was not valid UTF-8.
    ZzErrUtf8 = 3,
    /// An internal panic was caught.
    ZzErrPanic = 4,
}

fn parse_config(config_toml: *const c_char) -> Result<SuiteConfig, ZzStatus> {
    if config_toml.is_null() {
        return Ok(SuiteConfig::default());
    }
    let s = unsafe { CStr::from_ptr(config_toml) };
    let s = s.to_str().map_err(|_| ZzStatus::ZzErrUtf8)?;
    SuiteConfig::from_toml_str(s).map_err(|_| ZzStatus::ZzErrInvalidConfig)
}

fn run_suite(
    runner: fn(&SuiteConfig) -> Report,
    config_toml: *const c_char,
    out: *mut *mut ZzReport,
) -> ZzStatus {
    if out.is_null() {
        return ZzStatus::ZzErrNullArg;
    }
    unsafe { *out = ptr::null_mut() };
    let cfg = match parse_config(config_toml) {
        Ok(c) => c,
        Err(e) => return e,
    };
    match catch_unwind(AssertUnwindSafe(|| runner(&cfg))) {
        Ok(report) => {
            let boxed = Box::new(ZzReport { inner: report });
            unsafe { *out = Box::into_raw(boxed) };
            ZzStatus::ZzOk
        }
        Err(_) => ZzStatus::ZzErrPanic,
    }
}

/// Run the exact symbolic zigzag suite.  `config_toml` may be null for
/// defaults; on success `*out` owns a report handle.
#[no_mangle]
pub extern "C" fn zz_run_verify_zigzag(
    config_toml: *const c_char,
    out: *mut *mut ZzReport,
) -> ZzStatus {
    run_suite(run_verify_zigzag, config_toml, out)
}

/// Run the numeric path-space suite.
#[no_mangle]
pub extern "C" fn zz_run_verify_pathspace(
    config_toml: *const c_char,
    out: *mut *mut ZzReport,
) -> ZzStatus {
    run_suite(run_verify_pathspace, config_toml, out)
}

/// Compute the curved-cohomology dimension table suite.
#[no_mangle]
pub extern "C" fn zz_run_cohomology(
    config_toml: *const c_char,
    out: *mut *mut ZzReport,
) -> ZzStatus {
    run_suite(run_cohomology, config_toml, out)
}

/// 1 if every check in the report passed, 0 if any failed, -1 on null.
#[no_mangle]
pub extern "C" fn zz_report_all_pass(report: *const ZzReport) -> i32 {
    if report.is_null() {
        return -1;
    }
    let r = unsafe { &*report };
    if r.inner.all_pass {
        1
    } else {
        0
    }
}

/// Number of checks in the report, or -1 on null.
#[no_mangle]
pub extern "C" fn zz_report_check_count(report: *const ZzReport) -> i32 {
    if report.is_null() {
        return -1;
    }
    unsafe { &*report }.inner.checks.len() as i32
}

/// The full report as a JSON string; release with `zz_string_free`.
/// Returns null on a null handle.
#[no_mangle]
pub extern "C" fn zz_report_to_json(report: *const ZzReport) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    let json = unsafe { &*report }.inner.to_json();
    CString::new(json).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// The hex SHA-256 digest of the frozen sign conventions; release with
/// `zz_string_free`.
#[no_mangle]
pub extern "C" fn zz_sign_convention_digest() -> *mut c_char {
    CString::new(sign_convention_digest())
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Release a string returned by this library.  Null is a no-op.
#[no_mangle]
pub extern "C" fn zz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Release a report handle.  Null is a no-op.
#[no_mangle]
pub extern "C" fn zz_report_free(report: *mut ZzReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn run_zigzag_suite_through_the_abi() {
        let cfg = CString::new("instance = \"tensor\"\ntrials = 3\nn_max = 1\n").unwrap();
        let mut out: *mut ZzReport = ptr::null_mut();
        let st = zz_run_verify_zigzag(cfg.as_ptr(), &mut out);
        assert_eq!(st, ZzStatus::ZzOk);
        assert_eq!(zz_report_all_pass(out), 1);
        assert!(zz_report_check_count(out) >= 5);
        let json = zz_report_to_json(out);
        assert!(!json.is_null());
        let s = unsafe { CStr::from_ptr(json) }.to_str().unwrap();
        assert!(s.contains("\"suite\": \"verify-zigzag\""));
        zz_string_free(json);
        zz_report_free(out);
    }

    #[test]
    fn default_config_on_null_pointer() {
        let mut out: *mut ZzReport = ptr::null_mut();
        let st = zz_run_cohomology(ptr::null(), &mut out);
        assert_eq!(st, ZzStatus::ZzOk);
        assert_eq!(zz_report_all_pass(out), 1);
        zz_report_free(out);
    }

    #[test]
    fn error_codes() {
        let bad = CString::new("instance = \"nope\"").unwrap();
        let mut out: *mut ZzReport = ptr::null_mut();
        assert_eq!(
            zz_run_verify_zigzag(bad.as_ptr(), &mut out),
            ZzStatus::ZzErrInvalidConfig
        );
        assert!(out.is_null());
        assert_eq!(zz_run_verify_zigzag(ptr::null(), ptr::null_mut()), ZzStatus::ZzErrNullArg);
        assert_eq!(zz_report_all_pass(ptr::null()), -1);
        let invalid_utf8 = [0x66u8, 0xff, 0x00];
        assert_eq!(
            zz_run_verify_zigzag(invalid_utf8.as_ptr() as *const c_char, &mut out),
            ZzStatus::ZzErrUtf8
        );
    }

    #[test]
    fn digest_string_round_trip() {
        let d = zz_sign_convention_digest();
        let s = unsafe { CStr::from_ptr(d) }.to_str().unwrap();
        assert_eq!(s.len(), 64);
        zz_string_free(d);
    }
}
