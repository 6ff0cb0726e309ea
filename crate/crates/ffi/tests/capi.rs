use std::ffi::{CStr, CString};
use std::ptr;

use stackres_ffi::*;

const M11: &str = include_str!("../../../examples/m11.job");

fn run(text: &str, max_steps: usize) -> (StackresStatus, *mut StackresReport) {
    let job = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe { stackres_run_job(job.as_ptr(), max_steps, &mut out) };
    (s, out)
}

#[test]
fn golden_job_through_the_c_abi() {
    let (s, rep) = run(M11, 0);
    assert_eq!(s, StackresStatus::Ok);
    unsafe {
        let mut n = 0usize;
        assert_eq!(stackres_report_blowup_count(rep, &mut n), StackresStatus::Ok);
        assert_eq!(n, 3);
        let mut done = false;
        assert_eq!(stackres_report_is_resolved(rep, &mut done), StackresStatus::Ok);
        assert!(done);
        for (label, want) in [("E1''", 6), ("E2'", 4), ("E3", 2), ("C1'''", 1)] {
            let l = CString::new(label).unwrap();
            let (mut r, mut m) = (0, 0);
            assert_eq!(stackres_report_root_index(rep, l.as_ptr(), &mut r, &mut m), StackresStatus::Ok);
            assert_eq!(r, want, "{label}");
        }
        let l = CString::new("E9").unwrap();
        let (mut r, mut m) = (0, 0);
        assert_eq!(stackres_report_root_index(rep, l.as_ptr(), &mut r, &mut m), StackresStatus::NotFound);
        assert!(!stackres_last_error_message().is_null());

        let mut json = ptr::null_mut();
        assert_eq!(stackres_report_json(rep, &mut json), StackresStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        stackres_string_free(json);
        assert!(text.contains("\"schema_version\": 1"));
        let mut tex = ptr::null_mut();
        assert_eq!(stackres_report_latex(rep, &mut tex), StackresStatus::Ok);
        assert!(CStr::from_ptr(tex).to_str().unwrap().contains("tabular"));
        stackres_string_free(tex);
        stackres_report_free(rep);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let (s, rep) = run("[job]\nvariables = ['a']\n", 0);
    assert_eq!(s, StackresStatus::InvalidJob);
    assert!(rep.is_null());

    // budget of one blow-up: partial report comes back
    let (s, rep) = run(M11, 1);
    assert_eq!(s, StackresStatus::Unresolved);
    assert!(!rep.is_null());
    unsafe {
        let msg = CStr::from_ptr(stackres_last_error_message()).to_str().unwrap();
        assert!(msg.contains("blow-ups"), "{msg}");
        let mut done = true;
        stackres_report_is_resolved(rep, &mut done);
        assert!(!done);
        stackres_report_free(rep);
    }

    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(stackres_run_job(ptr::null(), 0, &mut out), StackresStatus::InvalidArgument);
        let mut n = 0usize;
        assert_eq!(stackres_report_blowup_count(ptr::null(), &mut n), StackresStatus::InvalidArgument);
        stackres_report_free(ptr::null_mut());
        stackres_string_free(ptr::null_mut());
    }
}

#[test]
fn root_index_entry_point() {
    let (mut r, mut m) = (0, 0);
    let s = unsafe { stackres_minimal_root_index([2, 3].as_ptr(), [4, 6].as_ptr(), 2, &mut r, &mut m) };
    assert_eq!(s, StackresStatus::Ok);
    assert_eq!((r, m), (2, 1));
    let s = unsafe { stackres_minimal_root_index([2, 3].as_ptr(), [0, 6].as_ptr(), 2, &mut r, &mut m) };
    assert_eq!(s, StackresStatus::InvalidArgument);
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/stackres.h")).unwrap();
    for name in [
        "stackres_run_job",
        "stackres_report_free",
        "stackres_report_json",
        "stackres_last_error_message",
        "STACKRES_STATUS_UNRESOLVED",
        "typedef struct StackresReport StackresReport",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
