//! C ABI for the query-time entity resolution engine.
//!
//! Datasets and query answers are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns a
//! [`QtresStatus`]; on failure [`qtres_last_error`] describes the problem for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qtres::analysis::closed_form_gp;
use qtres::corpus::{ingest_str, load_path, Dataset};
use qtres::query::{Engine, EngineConfig};
use qtres::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QtresStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    MalformedInput = 4,
    InvalidConfig = 5,
    UnknownReference = 6,
    OutOfRange = 7,
    Internal = 8,
}

/// A loaded reference dataset.
pub struct QtresDataset {
    inner: Dataset,
}

/// The answer to one query: clusters of reference ids.
pub struct QtresAnswer {
    answerable: bool,
    relevant: usize,
    clusters: Vec<Vec<CString>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> QtresStatus {
    match err {
        Error::Io(_) => QtresStatus::Io,
        Error::MalformedRecord { .. }
        | Error::DuplicatePublication(_)
        | Error::DuplicateReference(_)
        | Error::InvalidSnapshot(_)
        | Error::InvalidGold(_)
        | Error::Json(_) => QtresStatus::MalformedInput,
        Error::UnknownReference(_) => QtresStatus::UnknownReference,
        Error::InvalidConfig(_) | Error::InvalidParams(_) | Error::UnsupportedAttribute(_) => QtresStatus::InvalidConfig,
        Error::RetiredCluster(_) | Error::SelfMerge(_) | Error::NotAPartition(_) => QtresStatus::Internal,
    }
}

struct Failure(QtresStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> QtresStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QtresStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QtresStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(QtresStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(QtresStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn null(what: &str) -> Failure {
    Failure(QtresStatus::NullArgument, format!("{what} is null"))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn qtres_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Loads a record file or snapshot from `path`.
///
/// # Safety
/// `path` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qtres_dataset_load(path: *const c_char, out: *mut *mut QtresDataset) -> QtresStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let inner = load_path(Path::new(path))?;
        *out = Box::into_raw(Box::new(QtresDataset { inner }));
        Ok(())
    })
}

/// Parses newline-delimited records held in memory.
///
/// # Safety
/// `records` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qtres_dataset_parse(records: *const c_char, out: *mut *mut QtresDataset) -> QtresStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = ingest_str(str_arg(records, "records")?)?;
        *out = Box::into_raw(Box::new(QtresDataset { inner }));
        Ok(())
    })
}

/// Number of references in the dataset; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn qtres_dataset_len(ds: *const QtresDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.len())
}

/// # Safety
/// `ds` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qtres_dataset_free(ds: *mut QtresDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Resolves the references named `name`.
///
/// `config_toml` may be null for the built-in defaults. A negative `depth`
/// keeps the configured depth; a NaN `threshold` keeps the configured merge
/// threshold. An unanswerable query succeeds with an empty answer.
///
/// # Safety
/// `ds` must be a live dataset handle, strings nul-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qtres_query(
    ds: *const QtresDataset,
    config_toml: *const c_char,
    name: *const c_char,
    depth: c_int,
    threshold: c_double,
    out: *mut *mut QtresAnswer,
) -> QtresStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let name = str_arg(name, "name")?;
        let mut cfg =
            if config_toml.is_null() { EngineConfig::default() } else { qtres::config::from_toml_str(str_arg(config_toml, "config")?)? };
        if depth >= 0 {
            cfg.expansion.d_star = depth as usize;
        }
        if !threshold.is_nan() {
            if !(0.0..=1.0).contains(&threshold) {
                return Err(Failure(QtresStatus::OutOfRange, format!("threshold {threshold} outside [0,1]")));
            }
            cfg.similarity.merge_threshold = threshold;
        }
        let engine = Engine::new(&ds.inner, cfg)?;
        let ans = engine.resolve(name)?;
        let clusters = ans
            .clusters
            .iter()
            .map(|c| c.iter().map(|r| CString::new(ds.inner.reference(*r).id.as_str()).expect("ids have no nul")).collect())
            .collect();
        *out = Box::into_raw(Box::new(QtresAnswer { answerable: ans.answerable(), relevant: ans.relevant.len(), clusters }));
        Ok(())
    })
}

/// 1 if the query matched at least one reference, else 0.
///
/// # Safety
/// `ans` must be null or a live answer handle.
#[no_mangle]
pub unsafe extern "C" fn qtres_answer_is_answerable(ans: *const QtresAnswer) -> c_int {
    ans.as_ref().map_or(0, |a| a.answerable as c_int)
}

/// Size of the relevant set the answer was computed from.
///
/// # Safety
/// `ans` must be null or a live answer handle.
#[no_mangle]
pub unsafe extern "C" fn qtres_answer_relevant_size(ans: *const QtresAnswer) -> usize {
    ans.as_ref().map_or(0, |a| a.relevant)
}

/// # Safety
/// `ans` must be null or a live answer handle.
#[no_mangle]
pub unsafe extern "C" fn qtres_answer_cluster_count(ans: *const QtresAnswer) -> usize {
    ans.as_ref().map_or(0, |a| a.clusters.len())
}

/// Number of references in cluster `i`; 0 when out of range.
///
/// # Safety
/// `ans` must be null or a live answer handle.
#[no_mangle]
pub unsafe extern "C" fn qtres_answer_cluster_len(ans: *const QtresAnswer, i: usize) -> usize {
    ans.as_ref().and_then(|a| a.clusters.get(i)).map_or(0, Vec::len)
}

/// Id of reference `j` of cluster `i`, or null when out of range. The string
/// lives as long as the answer.
///
/// # Safety
/// `ans` must be null or a live answer handle.
#[no_mangle]
pub unsafe extern "C" fn qtres_answer_ref_id(ans: *const QtresAnswer, i: usize, j: usize) -> *const c_char {
    ans.as_ref().and_then(|a| a.clusters.get(i)).and_then(|c| c.get(j)).map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `ans` must be null or an answer handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qtres_answer_free(ans: *mut QtresAnswer) {
    if !ans.is_null() {
        drop(Box::from_raw(ans));
    }
}

/// Predicted recall after `n` expansion rounds under uniform attribute
/// identification probability `a` and relational probability `r`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qtres_closed_form_recall(a: c_double, r: c_double, n: u32, out: *mut c_double) -> QtresStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&r) {
            return Err(Failure(QtresStatus::OutOfRange, "probabilities must lie in [0,1]".into()));
        }
        *out = closed_form_gp(a, r, n);
        Ok(())
    })
}
