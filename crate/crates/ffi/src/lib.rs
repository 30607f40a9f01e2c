//! C interface to flingo-core.
//!
//! Programs live behind an opaque [`FlingoProgram`] handle. Every fallible
//! call returns a [`FlingoStatus`]; on failure a message is available from
//! [`flingo_last_error`] until the next call on the same thread. Strings
//! handed out by the library must be released with [`flingo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flingo_core::ast::{Program, Signature};
use flingo_core::difftest::diff_check;
use flingo_core::emitter::{emit_models, EmitOptions, ModelFormat};
use flingo_core::parser::{parse_program, render_program};
use flingo_core::rewriter::PipelineOptions;
use flingo_core::semantics::{EngineError, EngineOptions};
use flingo_core::Error;

/// Result codes. The non-zero values match the exit codes of the `flingo`
/// command where both exist.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlingoStatus {
    Ok = 0,
    /// Parse, validation or translation error.
    Invalid = 1,
    /// The reference solver's search-space estimate exceeded the budget.
    Budget = 2,
    /// An internal invariant failed.
    Internal = 3,
    /// A required pointer argument was null.
    NullArgument = 4,
    /// Input text was not valid UTF-8.
    InvalidUtf8 = 5,
    /// The translation disagrees with the reference semantics.
    Mismatch = 6,
    /// The program has no stable model.
    Unsatisfiable = 20,
}

/// A parsed ground program.
pub struct FlingoProgram {
    program: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> FlingoStatus {
    match e {
        Error::Engine(EngineError::BudgetExceeded { .. }) => FlingoStatus::Budget,
        Error::Emit(_) => FlingoStatus::Internal,
        _ => FlingoStatus::Invalid,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<FlingoStatus, (FlingoStatus, String)>) -> FlingoStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FlingoStatus::Internal
        }
    }
}

fn fail(e: Error) -> (FlingoStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (FlingoStatus, String) {
    (FlingoStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn program<'a>(p: *const FlingoProgram) -> Result<&'a Program, (FlingoStatus, String)> {
    // SAFETY: the caller passes a handle from `flingo_program_parse` that has not been freed.
    unsafe { p.as_ref() }
        .map(|h| &h.program)
        .ok_or_else(|| null("program"))
}

fn bounds(min_int: i64, max_int: i64) -> Result<Signature, (FlingoStatus, String)> {
    Signature::new(min_int, max_int).map_err(|e| fail(e.into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (FlingoStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let s = CString::new(s).map_err(|_| {
        (
            FlingoStatus::Internal,
            "output contains a NUL byte".to_string(),
        )
    })?;
    // SAFETY: `out` is non-null and points to writable storage for a pointer.
    unsafe { *out = s.into_raw() };
    Ok(())
}

/// Parses a ground program. On success `*out` receives a handle to release
/// with [`flingo_program_free`].
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flingo_program_parse(
    text: *const c_char,
    out: *mut *mut FlingoProgram,
) -> FlingoStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: checked non-null; the caller guarantees NUL termination.
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|e| (FlingoStatus::InvalidUtf8, e.to_string()))?;
        let program = parse_program(text).map_err(|e| fail(e.into()))?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(FlingoProgram { program })) };
        Ok(FlingoStatus::Ok)
    })
}

/// Releases a program handle. Null is ignored.
///
/// # Safety
/// `p` must come from [`flingo_program_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn flingo_program_free(p: *mut FlingoProgram) {
    if !p.is_null() {
        // SAFETY: the handle was created by `Box::into_raw` in `flingo_program_parse`.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Number of rules in the program, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live program handle.
#[no_mangle]
pub unsafe extern "C" fn flingo_program_rule_count(p: *const FlingoProgram) -> usize {
    // SAFETY: as documented.
    unsafe { p.as_ref() }.map_or(0, |h| h.program.rules.len())
}

/// Writes the canonical text of the program to `*out`.
///
/// # Safety
/// `p` must be a live program handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flingo_program_render(
    p: *const FlingoProgram,
    out: *mut *mut c_char,
) -> FlingoStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let program = unsafe { program(p) }?;
        unsafe { write_string(out, render_program(program)) }?;
        Ok(FlingoStatus::Ok)
    })
}

/// Translates the program and writes clingcon input to `*out`.
///
/// # Safety
/// `p` must be a live program handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flingo_translate(
    p: *const FlingoProgram,
    min_int: i64,
    max_int: i64,
    out: *mut *mut c_char,
) -> FlingoStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let program = unsafe { program(p) }?;
        let sig = bounds(min_int, max_int)?;
        let emit = EmitOptions {
            min_int,
            max_int,
            ..EmitOptions::default()
        };
        let (text, _) =
            flingo_core::compile(program, &sig, PipelineOptions::default(), &emit).map_err(fail)?;
        unsafe { write_string(out, text) }?;
        Ok(FlingoStatus::Ok)
    })
}

/// Enumerates stable models with the reference solver and writes them to
/// `*out` as a JSON array of `{"props": [...], "ints": {...}}` objects.
/// `max_models` 0 means all; `budget` 0 or less means the default budget.
/// Returns [`FlingoStatus::Unsatisfiable`] (with `[]` written) when there is
/// no model.
///
/// # Safety
/// `p` must be a live program handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flingo_solve(
    p: *const FlingoProgram,
    min_int: i64,
    max_int: i64,
    max_models: usize,
    budget: f64,
    out: *mut *mut c_char,
) -> FlingoStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let program = unsafe { program(p) }?;
        let sig = bounds(min_int, max_int)?;
        let mut opts = EngineOptions {
            max_models,
            ..EngineOptions::default()
        };
        if budget > 0.0 {
            opts.budget = Some(budget);
        }
        let models = flingo_core::solve(program, &sig, &opts).map_err(fail)?;
        unsafe { write_string(out, emit_models(&models, ModelFormat::Json)) }?;
        Ok(if models.is_empty() {
            FlingoStatus::Unsatisfiable
        } else {
            FlingoStatus::Ok
        })
    })
}

/// Compares the program's stable models with those of its translation.
/// Returns [`FlingoStatus::Mismatch`] when they differ. If `report` is not
/// null it receives a human-readable report.
///
/// # Safety
/// `p` must be a live program handle; `report` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn flingo_check(
    p: *const FlingoProgram,
    min_int: i64,
    max_int: i64,
    report: *mut *mut c_char,
) -> FlingoStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let program = unsafe { program(p) }?;
        let sig = bounds(min_int, max_int)?;
        let r = diff_check(program, &sig).map_err(|e| fail(e.into()))?;
        if !report.is_null() {
            unsafe { write_string(report, r.to_string()) }?;
        }
        Ok(if r.is_mismatch() {
            FlingoStatus::Mismatch
        } else {
            FlingoStatus::Ok
        })
    })
}

/// The message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn flingo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn flingo_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: created by `CString::into_raw` in `write_string`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// The library version as a static string.
#[no_mangle]
pub extern "C" fn flingo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
