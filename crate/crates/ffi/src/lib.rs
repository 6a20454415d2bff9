//! C interface to `lvmb`.
//!
//! Every fallible function returns an [`LvmbStatus`] and writes its result
//! through an out-pointer. On failure, [`lvmb_last_error`] describes what went
//! wrong on the calling thread. Handles are opaque and must be released with
//! the matching `*_free` function; strings returned by the library are
//! released with [`lvmb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lvmb::examples::builtin_example;
use lvmb::moment::{classify, verify_convexity, ClassificationReport, HarnessError, Verdict};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LvmbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or inconsistent JSON input.
    Parse = 3,
    UnknownExample = 4,
    /// The operation needs an LVM verdict.
    NotLvm = 5,
    /// The convexity harness could not build its model.
    Harness = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LvmbVerdict {
    Lvm = 0,
    LvmbNotLvm = 1,
    NotLvmb = 2,
}

impl From<Verdict> for LvmbVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Lvm => LvmbVerdict::Lvm,
            Verdict::LvmbNotLvm => LvmbVerdict::LvmbNotLvm,
            Verdict::NotLvmb => LvmbVerdict::NotLvmb,
        }
    }
}

/// Opaque input data (Δ, 𝔥).
pub struct LvmbData(lvmb::moment::LvmbData);

/// Opaque classification report.
pub struct LvmbClassification(ClassificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: LvmbStatus, msg: impl Into<String>) -> LvmbStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn guard(f: impl FnOnce() -> LvmbStatus) -> LvmbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(LvmbStatus::Internal, msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, LvmbStatus> {
    if s.is_null() {
        return Err(fail(LvmbStatus::NullPointer, "string argument is NULL"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(LvmbStatus::InvalidUtf8, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no nul bytes").into_raw()
}

macro_rules! deref {
    ($p:expr, $name:literal) => {{
        if $p.is_null() {
            return fail(LvmbStatus::NullPointer, concat!($name, " is NULL"));
        }
        &*$p
    }};
}

macro_rules! out {
    ($p:expr, $v:expr) => {{
        if $p.is_null() {
            return fail(LvmbStatus::NullPointer, "output pointer is NULL");
        }
        *$p = $v;
        LvmbStatus::Ok
    }};
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lvmb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lvmb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parse input data from JSON.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `out` must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lvmb_data_from_json(json: *const c_char, out: *mut *mut LvmbData) -> LvmbStatus {
    guard(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match serde_json::from_str::<lvmb::moment::LvmbData>(text) {
            Ok(d) => out!(out, Box::into_raw(Box::new(LvmbData(d)))),
            Err(e) => fail(LvmbStatus::Parse, e.to_string()),
        }
    })
}

/// Built-in data set by name, e.g. `"hopf"` or `"projective-space-3"`.
///
/// # Safety
/// As for [`lvmb_data_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lvmb_data_builtin(name: *const c_char, out: *mut *mut LvmbData) -> LvmbStatus {
    guard(|| {
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match builtin_example(name) {
            Ok(d) => out!(out, Box::into_raw(Box::new(LvmbData(d)))),
            Err(e) => fail(LvmbStatus::UnknownExample, e.to_string()),
        }
    })
}

/// Serialize data back to its JSON input form.
///
/// # Safety
/// `data` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn lvmb_data_to_json(data: *const LvmbData, out: *mut *mut c_char) -> LvmbStatus {
    guard(|| {
        let d = deref!(data, "data");
        out!(out, into_c_string(serde_json::to_string(&d.0).expect("data serializes")))
    })
}

/// # Safety
/// `data` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lvmb_data_free(data: *mut LvmbData) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Run the full classification.
///
/// # Safety
/// `data` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn lvmb_classify(data: *const LvmbData, out: *mut *mut LvmbClassification) -> LvmbStatus {
    guard(|| {
        let d = deref!(data, "data");
        out!(out, Box::into_raw(Box::new(LvmbClassification(classify(&d.0)))))
    })
}

/// # Safety
/// `c` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn lvmb_classification_verdict(c: *const LvmbClassification, out: *mut LvmbVerdict) -> LvmbStatus {
    let c = deref!(c, "classification");
    out!(out, c.0.verdict.into())
}

/// Dimension, facet count and vertex count of P. Fails with
/// `NotLvm` when there is no polytope.
///
/// # Safety
/// `c` must be NULL or a live handle; the out-pointers must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lvmb_classification_polytope_shape(
    c: *const LvmbClassification,
    dim: *mut usize,
    facets: *mut usize,
    vertices: *mut usize,
) -> LvmbStatus {
    let c = deref!(c, "classification");
    let Some(p) = &c.0.polytope else {
        return fail(LvmbStatus::NotLvm, format!("verdict is {}, no polytope", c.0.verdict));
    };
    if dim.is_null() || facets.is_null() || vertices.is_null() {
        return fail(LvmbStatus::NullPointer, "output pointer is NULL");
    }
    *dim = p.dim;
    *facets = p.normals.len();
    *vertices = p.vertices.as_ref().map_or(0, Vec::len);
    LvmbStatus::Ok
}

/// Full report as JSON.
///
/// # Safety
/// `c` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn lvmb_classification_to_json(c: *const LvmbClassification, out: *mut *mut c_char) -> LvmbStatus {
    guard(|| {
        let c = deref!(c, "classification");
        out!(out, into_c_string(serde_json::to_string(&c.0).expect("report serializes")))
    })
}

/// # Safety
/// `c` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lvmb_classification_free(c: *mut LvmbClassification) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Run the convexity harness. Writes the JSON report to `out_json` and the
/// overall result to `out_pass`; either may be NULL if unwanted.
///
/// # Safety
/// `data` must be NULL or a live handle; out-pointers must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lvmb_verify_convexity(
    data: *const LvmbData,
    samples: usize,
    seed: u64,
    tol: f64,
    out_json: *mut *mut c_char,
    out_pass: *mut bool,
) -> LvmbStatus {
    guard(|| {
        let d = deref!(data, "data");
        match verify_convexity(&d.0, samples, seed, tol) {
            Ok(report) => {
                if !out_pass.is_null() {
                    *out_pass = report.pass;
                }
                if !out_json.is_null() {
                    *out_json = into_c_string(serde_json::to_string(&report).expect("report serializes"));
                }
                LvmbStatus::Ok
            }
            Err(e @ HarnessError::NotLvm(_)) => fail(LvmbStatus::NotLvm, e.to_string()),
            Err(e @ HarnessError::Model(_)) => fail(LvmbStatus::Harness, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lvmb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
