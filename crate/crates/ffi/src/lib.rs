//! C interface to the resolution engine.
//!
//! Reports are opaque handles owned by the caller and released with
//! `stackres_report_free`. Strings returned by the library are released with
//! `stackres_string_free`. Every function returns a `StackresStatus`; details
//! of the most recent failure on the calling thread are available from
//! `stackres_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stackres::job::JobSpec;
use stackres::pipeline::run_job;
use stackres::report::{emit_report_json, emit_report_latex, ResolutionReport, Status};
use stackres::root_index::minimal_root_index;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StackresStatus {
    Ok = 0,
    /// A null pointer, bad UTF-8 or an out-of-range argument.
    InvalidArgument = 1,
    /// The job text does not describe a valid job.
    InvalidJob = 2,
    /// The job is valid but cannot be resolved as asked (non-rational center,
    /// exhausted budget). A partial report is still returned.
    Unresolved = 3,
    /// An internal invariant failed. A partial report is still returned.
    Internal = 4,
    NotFound = 5,
    Panic = 6,
}

/// A finished or partial resolution report.
pub struct StackresReport {
    inner: ResolutionReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> StackresStatus) -> StackresStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside stackres");
            StackresStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, StackresStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(StackresStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        StackresStatus::InvalidArgument
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// call into the library from the same thread.
#[no_mangle]
pub extern "C" fn stackres_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stackres_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Run the job given as TOML text. On `OK`, `UNRESOLVED` and `INTERNAL` a
/// report handle is stored in `*out`; otherwise `*out` is set to NULL.
///
/// # Safety
/// `job_toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stackres_run_job(
    job_toml: *const c_char,
    max_steps: usize,
    out: *mut *mut StackresReport,
) -> StackresStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return StackresStatus::InvalidArgument;
        }
        *out = ptr::null_mut();
        let text = match read_str(job_toml) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let mut job = match JobSpec::from_toml(text) {
            Ok(j) => j,
            Err(e) => {
                set_error(e.to_string());
                return StackresStatus::InvalidJob;
            }
        };
        // 0 keeps the job's own budget
        if max_steps > 0 {
            job.max_steps = max_steps;
        }
        let (report, status) = match run_job(&job) {
            Ok(r) => (r, StackresStatus::Ok),
            Err(e) => {
                set_error(e.to_string());
                let s = if e.is_internal() {
                    StackresStatus::Internal
                } else {
                    StackresStatus::Unresolved
                };
                (*e.partial, s)
            }
        };
        *out = Box::into_raw(Box::new(StackresReport { inner: report }));
        status
    })
}

/// # Safety
/// `report` must come from `stackres_run_job` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn stackres_report_free(report: *mut StackresReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn stackres_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn report_ref<'a>(r: *const StackresReport) -> Result<&'a ResolutionReport, StackresStatus> {
    r.as_ref().map(|r| &r.inner).ok_or_else(|| {
        set_error("null report handle");
        StackresStatus::InvalidArgument
    })
}

/// Whether the report is complete.
///
/// # Safety
/// `report` must be a live handle, `resolved` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stackres_report_is_resolved(
    report: *const StackresReport,
    resolved: *mut bool,
) -> StackresStatus {
    guard(|| match (report_ref(report), resolved.is_null()) {
        (Ok(r), false) => {
            *resolved = r.status == Status::Resolved;
            StackresStatus::Ok
        }
        (Err(s), _) => s,
        (_, true) => {
            set_error("null output pointer");
            StackresStatus::InvalidArgument
        }
    })
}

/// Number of blow-ups performed.
///
/// # Safety
/// `report` must be a live handle, `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stackres_report_blowup_count(
    report: *const StackresReport,
    count: *mut usize,
) -> StackresStatus {
    guard(|| match (report_ref(report), count.is_null()) {
        (Ok(r), false) => {
            *count = r.blowup_count;
            StackresStatus::Ok
        }
        (Err(s), _) => s,
        (_, true) => {
            set_error("null output pointer");
            StackresStatus::InvalidArgument
        }
    })
}

/// Root index `r` and twist `m` recorded for the divisor labelled `divisor`
/// (for example `E1''`).
///
/// # Safety
/// `report` must be a live handle, `divisor` NUL-terminated, `r` and `m` valid.
#[no_mangle]
pub unsafe extern "C" fn stackres_report_root_index(
    report: *const StackresReport,
    divisor: *const c_char,
    r: *mut u32,
    m: *mut u32,
) -> StackresStatus {
    guard(|| {
        let rep = match report_ref(report) {
            Ok(x) => x,
            Err(s) => return s,
        };
        let label = match read_str(divisor) {
            Ok(x) => x,
            Err(s) => return s,
        };
        if r.is_null() || m.is_null() {
            set_error("null output pointer");
            return StackresStatus::InvalidArgument;
        }
        match rep.root_index(label) {
            Some(res) => {
                *r = res.r;
                *m = res.m;
                StackresStatus::Ok
            }
            None => {
                set_error(format!("no divisor labelled {label}"));
                StackresStatus::NotFound
            }
        }
    })
}

unsafe fn emit(
    report: *const StackresReport,
    out: *mut *mut c_char,
    f: impl FnOnce(&ResolutionReport) -> String,
) -> StackresStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return StackresStatus::InvalidArgument;
        }
        *out = ptr::null_mut();
        match report_ref(report) {
            Ok(r) => {
                *out = into_c_string(f(r));
                StackresStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Deterministic JSON form of the report; free with `stackres_string_free`.
///
/// # Safety
/// `report` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stackres_report_json(
    report: *const StackresReport,
    out: *mut *mut c_char,
) -> StackresStatus {
    emit(report, out, |r| String::from_utf8_lossy(&emit_report_json(r)).into_owned())
}

/// LaTeX tables of the report; free with `stackres_string_free`.
///
/// # Safety
/// `report` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stackres_report_latex(
    report: *const StackresReport,
    out: *mut *mut c_char,
) -> StackresStatus {
    emit(report, out, emit_report_latex)
}

/// Minimal root index for `k` vanishing orders against `k` weights.
///
/// # Safety
/// `orders` and `weights` must point to `k` values; `r` and `m` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stackres_minimal_root_index(
    orders: *const u32,
    weights: *const u32,
    k: usize,
    r: *mut u32,
    m: *mut u32,
) -> StackresStatus {
    guard(|| {
        if orders.is_null() || weights.is_null() || r.is_null() || m.is_null() {
            set_error("null pointer argument");
            return StackresStatus::InvalidArgument;
        }
        let orders = std::slice::from_raw_parts(orders, k);
        let weights = std::slice::from_raw_parts(weights, k);
        if k < 2 || weights.contains(&0) {
            set_error("need at least two positive weights");
            return StackresStatus::InvalidArgument;
        }
        let res = minimal_root_index("D", orders, weights);
        *r = res.r;
        *m = res.m;
        StackresStatus::Ok
    })
}
