//! C ABI over the gonality library.
//!
//! Every fallible function returns a `GonalityStatus` and writes its result
//! through an out pointer. On failure the message is kept per thread and read
//! back with `gonality_last_error`. Fact stores are opaque handles released
//! with `gonality_facts_free`; strings returned to the caller are released
//! with `gonality_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gonality::arith::make_level;
use gonality::engine::{self, Status};
use gonality::facts::{parse_facts, FactStore};
use gonality::hecke::{count_points, trace_tm};
use gonality::modgenus::{genus_pair_quotient, genus_single_quotient, genus_x0, CurveRef};
use gonality::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GonalityStatus {
    Ok = 0,
    NullPointer = 1,
    /// an argument is outside the domain of the call
    InvalidArgument = 2,
    Parse = 3,
    Contradiction = 4,
    Inconsistent = 5,
    Io = 6,
    Panic = 7,
}

/// Opaque set of literature facts.
pub struct GonalityFactStore(FactStore);

/// Gonality interval of `X0(N)/w_d`. Unbounded uppers are `UINT32_MAX`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GonalityBounds {
    pub genus: u64,
    pub lower_q: u32,
    pub upper_q: u32,
    pub lower_c: u32,
    pub upper_c: u32,
    /// both fields decided
    pub decided: bool,
}

/// Marker for an unbounded upper bound.
pub const GONALITY_UNBOUNDED: u32 = u32::MAX;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(error: &Error) -> GonalityStatus {
    match error {
        Error::Parse(_) => GonalityStatus::Parse,
        Error::Contradiction { .. } => GonalityStatus::Contradiction,
        Error::Inconsistent(_) => GonalityStatus::Inconsistent,
        _ => GonalityStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (GonalityStatus, String)>) -> GonalityStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GonalityStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GonalityStatus::Panic
        }
    }
}

fn lib(error: Error) -> (GonalityStatus, String) {
    (status_of(&error), error.to_string())
}

fn null(name: &str) -> (GonalityStatus, String) {
    (GonalityStatus::NullPointer, format!("{name} is null"))
}

unsafe fn out_ref<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, (GonalityStatus, String)> {
    ptr.as_mut().ok_or_else(|| null(name))
}

unsafe fn c_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, (GonalityStatus, String)> {
    if ptr.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| (GonalityStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn store_handle(store: FactStore) -> *mut GonalityFactStore {
    Box::into_raw(Box::new(GonalityFactStore(store)))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn gonality_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gonality_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The fact store shipped with the library.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gonality_facts_shipped(out: *mut *mut GonalityFactStore) -> GonalityStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = store_handle(gonality::data::shipped_facts().map_err(lib)?);
        Ok(())
    })
}

/// A store with no facts.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gonality_facts_empty(out: *mut *mut GonalityFactStore) -> GonalityStatus {
    guard(|| {
        *out_ref(out, "out")? = store_handle(FactStore::empty());
        Ok(())
    })
}

/// Parse a fact file held in memory.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gonality_facts_parse(text: *const c_char, out: *mut *mut GonalityFactStore) -> GonalityStatus {
    guard(|| {
        let text = c_str(text, "text")?;
        let out = out_ref(out, "out")?;
        let store = parse_facts(text).map_err(|e| (GonalityStatus::Parse, e.to_string()))?;
        *out = store_handle(store);
        Ok(())
    })
}

/// Load a fact file from disk.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gonality_facts_load(path: *const c_char, out: *mut *mut GonalityFactStore) -> GonalityStatus {
    guard(|| {
        let path = c_str(path, "path")?;
        let out = out_ref(out, "out")?;
        let text = std::fs::read_to_string(path).map_err(|e| (GonalityStatus::Io, format!("{path}: {e}")))?;
        let store = parse_facts(&text).map_err(|e| (GonalityStatus::Parse, e.to_string()))?;
        *out = store_handle(store);
        Ok(())
    })
}

/// Number of facts in a store, 0 for NULL.
///
/// # Safety
/// `store` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gonality_facts_len(store: *const GonalityFactStore) -> usize {
    store.as_ref().map_or(0, |s| s.0.len())
}

/// Release a store. NULL is ignored.
///
/// # Safety
/// `store` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gonality_facts_free(store: *mut GonalityFactStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Genus of `X0(N)` (`d = 1`), `X0(N)/w_d` (`d2 = 0`) or `X0(N)/<w_d, w_d2>`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gonality_genus(n: u64, d: u64, d2: u64, out: *mut u64) -> GonalityStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let level = make_level(n).map_err(lib)?;
        *out = match (d, d2) {
            (1, 0) => genus_x0(&level).genus,
            (_, 0) => genus_single_quotient(&level, d).map_err(lib)?.genus,
            _ => genus_pair_quotient(&level, d, d2).map_err(lib)?.genus,
        };
        Ok(())
    })
}

/// `#X0(N)(F_{p^deg})` for `deg` in {1, 2}.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gonality_count_points(n: u64, p: u64, deg: u32, out: *mut u64) -> GonalityStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let level = make_level(n).map_err(lib)?;
        *out = count_points(&level, p, deg).map_err(lib)?.count;
        Ok(())
    })
}

/// Trace of `T_m` on weight-2 cusp forms for `Gamma_0(N)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gonality_trace(n: u64, m: u64, out: *mut i64) -> GonalityStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let level = make_level(n).map_err(lib)?;
        *out = trace_tm(&level, m).map_err(lib)?.value;
        Ok(())
    })
}

/// Gonality bounds of `X0(N)/w_d` under a fact store. When `certificate` is
/// not NULL it receives the certificate summary, to be released with
/// `gonality_string_free`.
///
/// # Safety
/// `store` must be a live handle, `out` a valid pointer and `certificate`
/// NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gonality_classify(
    store: *const GonalityFactStore,
    n: u64,
    d: u64,
    out: *mut GonalityBounds,
    certificate: *mut *mut c_char,
) -> GonalityStatus {
    guard(|| {
        let store = store.as_ref().ok_or_else(|| null("store"))?;
        let out = out_ref(out, "out")?;
        let level = make_level(n).map_err(lib)?;
        let curve = CurveRef::single(level, d).map_err(lib)?;
        let state = engine::classify(&curve, &store.0).map_err(lib)?;
        *out = GonalityBounds {
            genus: state.genus,
            lower_q: state.lower_q,
            upper_q: state.upper_q,
            lower_c: state.lower_c,
            upper_c: state.upper_c,
            decided: state.status() == Status::Decided,
        };
        if let Some(slot) = certificate.as_mut() {
            let text = CString::new(state.certificate.summary()).unwrap_or_default();
            *slot = text.into_raw();
        }
        Ok(())
    })
}
