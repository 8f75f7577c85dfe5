//! C ABI over `rspin-core`.
//!
//! Every fallible entry point returns an [`RspinError`] code. On failure a
//! message is available from [`rspin_last_error`] on the calling thread.
//! Values come back as heap allocated `"num/den"` strings which the caller
//! releases with [`rspin_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use rspin_core::dr1::{b_value, closed_form};
use rspin_core::genus0::loop_sum;
use rspin_core::rational::to_wire;
use rspin_core::{Dr1Bracket, Engine, Error, EvalResult, Genus0Bracket, Status};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RspinError {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    NullOrInvalidArgument = 1,
    /// Bad spin, grading, list length or bracket shape.
    InvalidInput = 2,
    /// Solver could not pin down the value.
    Undetermined = 3,
    /// Cache file could not be read, parsed or written.
    Cache = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// Why a returned value is what it is.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RspinValueStatus {
    Computed = 0,
    DimensionMismatchZero = 1,
    VanishingAxiomZero = 2,
}

/// Opaque evaluation engine. Safe to share between threads.
pub struct RspinEngine {
    inner: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &Error) -> RspinError {
    match e {
        Error::Underdetermined { .. } | Error::ReductionStalled { .. } | Error::Inconsistent(_) => {
            RspinError::Undetermined
        }
        Error::CacheParse { .. } | Error::SchemaVersion(_) | Error::Io(_) => RspinError::Cache,
        _ => RspinError::InvalidInput,
    }
}

struct Fail(RspinError, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn null_arg(what: &str) -> Fail {
    Fail(RspinError::NullOrInvalidArgument, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RspinError {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RspinError::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            RspinError::Internal
        }
    }
}

unsafe fn ints<'a>(p: *const i64, len: usize, what: &str) -> Result<&'a [i64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null_arg(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn engine<'a>(e: *const RspinEngine) -> Result<&'a Engine, Fail> {
    e.as_ref().map(|e| &e.inner).ok_or_else(|| null_arg("engine"))
}

unsafe fn path_arg(p: *const c_char) -> Result<Option<String>, Fail> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(|s| Some(s.to_owned()))
        .map_err(|_| Fail(RspinError::NullOrInvalidArgument, "path is not UTF-8".into()))
}

unsafe fn write_value(
    result: EvalResult,
    out_value: *mut *mut c_char,
    out_status: *mut RspinValueStatus,
) -> Result<(), Fail> {
    if out_value.is_null() {
        return Err(null_arg("out_value"));
    }
    let s = CString::new(to_wire(&result.value)).expect("wire form has no NUL");
    *out_value = s.into_raw();
    if !out_status.is_null() {
        *out_status = match result.status {
            Status::Ok => RspinValueStatus::Computed,
            Status::DimensionMismatchZero => RspinValueStatus::DimensionMismatchZero,
            Status::VanishingAxiomZero => RspinValueStatus::VanishingAxiomZero,
        };
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rspin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL terminated string.
#[no_mangle]
pub extern "C" fn rspin_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn rspin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an engine. With a non-null `cache_path` the cache file is loaded
/// if it exists; a missing file starts an empty cache.
///
/// # Safety
/// `cache_path` is null or a NUL terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rspin_engine_new(cache_path: *const c_char, out: *mut *mut RspinEngine) -> RspinError {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let inner = match path_arg(cache_path)? {
            Some(p) => Engine::open(p)?,
            None => Engine::new(),
        };
        *out = Box::into_raw(Box::new(RspinEngine { inner }));
        Ok(())
    })
}

/// Destroys an engine. Null is ignored.
///
/// # Safety
/// `engine` must come from [`rspin_engine_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rspin_engine_free(engine: *mut RspinEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Writes the engine's cache atomically to `path` if anything changed.
///
/// # Safety
/// `engine` is a live handle and `path` a NUL terminated string.
#[no_mangle]
pub unsafe extern "C" fn rspin_engine_save(engine: *const RspinEngine, path: *const c_char) -> RspinError {
    guard(|| {
        let e = self::engine(engine)?;
        let p = path_arg(path)?.ok_or_else(|| null_arg("path"))?;
        e.save(p)?;
        Ok(())
    })
}

/// Number of entries currently held in the engine's cache.
///
/// # Safety
/// `engine` is a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn rspin_engine_cache_len(engine: *const RspinEngine) -> usize {
    engine.as_ref().map_or(0, |e| e.inner.store().len())
}

/// Genus-0 correlator with insertions `a[0..n]`.
///
/// # Safety
/// `a` points to `n` integers; `out_value` is writable; `out_status` may be null.
#[no_mangle]
pub unsafe extern "C" fn rspin_g0(
    engine: *const RspinEngine,
    r: i64,
    a: *const i64,
    n: usize,
    out_value: *mut *mut c_char,
    out_status: *mut RspinValueStatus,
) -> RspinError {
    guard(|| {
        let e = self::engine(engine)?;
        let bracket = Genus0Bracket::new(r, ints(a, n, "a")?)?;
        write_value(e.solve_bracket(&bracket)?, out_value, out_status)
    })
}

/// Closed loop-sum formula. `extended` allows m up to r.
///
/// # Safety
/// `x` points to `n` integers; `out_value` is writable.
#[no_mangle]
pub unsafe extern "C" fn rspin_loop_sum(
    r: i64,
    m: i64,
    x: *const i64,
    n: usize,
    extended: bool,
    out_value: *mut *mut c_char,
) -> RspinError {
    guard(|| {
        let v = loop_sum(r, m, ints(x, n, "x")?, extended)?;
        write_value(EvalResult::ok(v), out_value, ptr::null_mut())
    })
}

/// One-psi genus-1 correlator B from its closed formula.
///
/// # Safety
/// `a` points to `n` integers; `out_value` is writable; `out_status` may be null.
#[no_mangle]
pub unsafe extern "C" fn rspin_b_value(
    r: i64,
    a: *const i64,
    n: usize,
    out_value: *mut *mut c_char,
    out_status: *mut RspinValueStatus,
) -> RspinError {
    guard(|| write_value(b_value(r, ints(a, n, "a")?)?, out_value, out_status))
}

/// B computed by reduction to genus-0 brackets.
///
/// # Safety
/// As for [`rspin_b_value`], plus a live `engine`.
#[no_mangle]
pub unsafe extern "C" fn rspin_b_value_trr(
    engine: *const RspinEngine,
    r: i64,
    a: *const i64,
    n: usize,
    out_value: *mut *mut c_char,
    out_status: *mut RspinValueStatus,
) -> RspinError {
    guard(|| {
        let e = self::engine(engine)?;
        write_value(e.b_value_trr(r, ints(a, n, "a")?)?, out_value, out_status)
    })
}

/// Genus-1 DR bracket from the closed formula. `k` and `a` both have length `n`.
///
/// # Safety
/// `k` and `a` point to `n` integers each; `out_value` is writable.
#[no_mangle]
pub unsafe extern "C" fn rspin_dr1_closed(
    r: i64,
    k: *const i64,
    a: *const i64,
    n: usize,
    out_value: *mut *mut c_char,
    out_status: *mut RspinValueStatus,
) -> RspinError {
    guard(|| {
        let bracket = Dr1Bracket::new(r, ints(k, n, "k")?, ints(a, n, "a")?)?;
        write_value(closed_form(&bracket), out_value, out_status)
    })
}

/// Genus-1 DR bracket solved from the linear relations alone.
///
/// # Safety
/// As for [`rspin_dr1_closed`], plus a live `engine`.
#[no_mangle]
pub unsafe extern "C" fn rspin_dr1_relational(
    engine: *const RspinEngine,
    r: i64,
    k: *const i64,
    a: *const i64,
    n: usize,
    out_value: *mut *mut c_char,
    out_status: *mut RspinValueStatus,
) -> RspinError {
    guard(|| {
        let e = self::engine(engine)?;
        write_value(e.dr1_relational(r, ints(k, n, "k")?, ints(a, n, "a")?)?, out_value, out_status)
    })
}
