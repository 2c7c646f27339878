//! C ABI over the elimpar engine.
//!
//! Every fallible call returns an [`ElimparStatus`]; on failure the message
//! is available from [`elimpar_last_error`] on the same thread. Handles are
//! opaque and owned by the caller until passed to their `_free` function.
//! Strings returned through `char **` are released with
//! [`elimpar_string_free`].

use elimpar::elimination::{conservative_at_level, eliminates_at_tuple, eliminates_parameters, FormulaPool};
use elimpar::groupoid::{load_groupoid, GroupoidDoc, LoadedGroupoid};
use elimpar::syntax::{print_formula, print_theory, Theory};
use elimpar::theorygen::{synthesize, SynthesisBounds};
use elimpar::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElimparStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    UnknownParameter = 5,
    CapExceeded = 6,
    Io = 7,
    Panic = 8,
}

/// A validated groupoid with its parameter indexing.
pub struct ElimparGroupoid {
    inner: LoadedGroupoid,
}

/// A parsed theory.
pub struct ElimparTheory {
    inner: Theory,
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

fn status_of(e: &Error) -> ElimparStatus {
    match e {
        Error::Syntax { .. } | Error::Json(_) => ElimparStatus::Parse,
        Error::UnknownParameter(_) => ElimparStatus::UnknownParameter,
        Error::CapExceeded { .. } => ElimparStatus::CapExceeded,
        Error::Io { .. } => ElimparStatus::Io,
        _ => ElimparStatus::Invalid,
    }
}

struct Failure(ElimparStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f` behind a panic guard, recording any failure message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ElimparStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ElimparStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            ElimparStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(ElimparStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ElimparStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn elimpar_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn elimpar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elimpar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a groupoid from its JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_groupoid_from_json(json: *const c_char, out: *mut *mut ElimparGroupoid) -> ElimparStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inner = load_groupoid(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(ElimparGroupoid { inner }));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elimpar_groupoid_free(g: *mut ElimparGroupoid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_groupoid_object_count(g: *const ElimparGroupoid, out: *mut usize) -> ElimparStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(g, "g")?.inner.groupoid.len();
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_groupoid_arrow_count(g: *const ElimparGroupoid, out: *mut usize) -> ElimparStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(g, "g")?.inner.groupoid.arrows().len();
        Ok(())
    })
}

/// The same objects and indexing with every isomorphism between objects.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_groupoid_etale_completion(
    g: *const ElimparGroupoid,
    out: *mut *mut ElimparGroupoid,
) -> ElimparStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let lg = &ref_arg(g, "g")?.inner;
        let inner = LoadedGroupoid {
            groupoid: lg.groupoid.etale_completion(),
            indexing: lg.indexing.clone(),
            explicit_indexing: lg.explicit_indexing,
            auto_complete: lg.auto_complete,
            etale_complete: true,
        };
        *out = Box::into_raw(Box::new(ElimparGroupoid { inner }));
        Ok(())
    })
}

/// Serializes the groupoid with every arrow listed.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_groupoid_to_json(g: *const ElimparGroupoid, out: *mut *mut c_char) -> ElimparStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let lg = &ref_arg(g, "g")?.inner;
        *out = c_string(GroupoidDoc::from_groupoid(&lg.groupoid, Some(&lg.indexing)).to_json());
        Ok(())
    })
}

/// Parses a geometric theory in the DSL.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_theory_parse(text: *const c_char, out: *mut *mut ElimparTheory) -> ElimparStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inner = elimpar::cli::load_theory_text(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(ElimparTheory { inner }));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elimpar_theory_free(t: *mut ElimparTheory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_theory_axiom_count(t: *const ElimparTheory, out: *mut usize) -> ElimparStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(t, "t")?.inner.axioms.len();
        Ok(())
    })
}

/// Prints the theory in the DSL.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_theory_to_string(t: *const ElimparTheory, out: *mut *mut c_char) -> ElimparStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        *out = c_string(print_theory(&ref_arg(t, "t")?.inner));
        Ok(())
    })
}

/// Whether every parameter tuple up to `max_tuple` has a parameter-free
/// orbit.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_eliminates_parameters(
    g: *const ElimparGroupoid,
    max_tuple: usize,
    out: *mut bool,
) -> ElimparStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let lg = &ref_arg(g, "g")?.inner;
        *out = eliminates_parameters(&lg.groupoid, &lg.indexing, max_tuple)?.eliminates;
        Ok(())
    })
}

/// Orbit of `x⃗ = m⃗` for the comma-separated parameter names in `tuple`.
/// Writes the orbit size and, when the orbit is parameter-free definable,
/// its formula (otherwise null).
///
/// # Safety
/// `g` must be a live handle, `tuple` a nul-terminated string and both
/// outputs writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_orbit(
    g: *const ElimparGroupoid,
    tuple: *const c_char,
    orbit_size: *mut usize,
    formula: *mut *mut c_char,
) -> ElimparStatus {
    guard(|| {
        let size_out = out_arg(orbit_size, "orbit_size")?;
        let formula_out = out_arg(formula, "formula")?;
        *formula_out = ptr::null_mut();
        let lg = &ref_arg(g, "g")?.inner;
        let names: Vec<String> = str_arg(tuple, "tuple")?.split(',').map(|s| s.trim().to_string()).collect();
        let params = lg.indexing.resolve(&names)?;
        let e = eliminates_at_tuple(&lg.groupoid, &lg.indexing, &params)?;
        *size_out = e.orbit.len();
        if let Some(f) = &e.formula {
            *formula_out = c_string(print_formula(f));
        }
        Ok(())
    })
}

/// Conservativity against all models with at most `size_bound` elements
/// per sort, comparing atomic formulas in up to `pool_vars` variables.
///
/// # Safety
/// `g` and `t` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_is_conservative(
    g: *const ElimparGroupoid,
    t: *const ElimparTheory,
    size_bound: usize,
    pool_vars: usize,
    out: *mut bool,
) -> ElimparStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let lg = &ref_arg(g, "g")?.inner;
        let t = &ref_arg(t, "t")?.inner;
        let pool = FormulaPool::atomic(lg.groupoid.signature(), pool_vars, true);
        let v = conservative_at_level(&lg.groupoid, t, &pool, size_bound, size_bound, elimpar::cli::DEFAULT_MODEL_CAP)?;
        *out = v.conservative;
        Ok(())
    })
}

/// The theory of the groupoid over the signature extended by one relation
/// per parameter tuple of length at most `tuple_bound`, with default
/// sequent bounds.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elimpar_synthesize_theory(
    g: *const ElimparGroupoid,
    tuple_bound: usize,
    out: *mut *mut ElimparTheory,
) -> ElimparStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let lg = &ref_arg(g, "g")?.inner;
        let s = synthesize(&lg.groupoid, &lg.indexing, tuple_bound, &SynthesisBounds::default())?;
        *out = Box::into_raw(Box::new(ElimparTheory { inner: s.theory }));
        Ok(())
    })
}
