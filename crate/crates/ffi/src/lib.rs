//! C ABI over the jumpgen engine.
//!
//! A session owns a parsed configuration and the chain built from it.
//! Every call returns a `JgStatus`; on failure a message is available from
//! `jg_last_error` until the next call on the same thread. Strings handed
//! out by the library must be released with `jg_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jumpgen::config::Config;
use jumpgen::golden::{verify_example, EXAMPLE_GOLDEN};
use jumpgen::jumpseq::JumpState;
use jumpgen::report::{ideal_rows, ReportDoc};
use jumpgen::values::Value;

/// Result codes. The first four agree with the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JgStatus {
    Ok = 0,
    Mismatch = 1,
    Config = 2,
    Internal = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque handle to a built chain.
pub struct JgSession {
    config: Config,
    state: JumpState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(JgStatus, String);

fn guard(f: impl FnOnce() -> Result<JgStatus, Fail>) -> JgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside jumpgen");
            JgStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(JgStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(JgStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn hand_out(out: *mut *mut c_char, s: String) -> Result<JgStatus, Fail> {
    let c = CString::new(s).map_err(|e| Fail(JgStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(JgStatus::Ok)
}

fn null_out<T>(out: *mut T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail(JgStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Parses a JSON configuration and builds its chain.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_session_new(config_json: *const c_char, out: *mut *mut JgSession) -> JgStatus {
    guard(|| {
        null_out(out, "out")?;
        *out = ptr::null_mut();
        let src = text(config_json, "config_json")?;
        let config = Config::parse(src).map_err(|diags| {
            let msg = diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n");
            Fail(JgStatus::Config, msg)
        })?;
        let state = JumpState::build(config.model.clone(), config.bounds.clone())
            .map_err(|e| Fail(JgStatus::Internal, e.to_string()))?;
        *out = Box::into_raw(Box::new(JgSession { config, state }));
        Ok(JgStatus::Ok)
    })
}

/// Releases a session. Null is accepted.
///
/// # Safety
/// `session` must come from `jg_session_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jg_session_free(session: *mut JgSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

unsafe fn session<'a>(p: *const JgSession) -> Result<&'a JgSession, Fail> {
    p.as_ref().ok_or_else(|| Fail(JgStatus::NullArgument, "session is null".into()))
}

/// Number of T-chain elements built.
///
/// # Safety
/// `session` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn jg_session_t_len(session: *const JgSession, out: *mut usize) -> JgStatus {
    guard(|| {
        null_out(out, "out")?;
        *out = self::session(session)?.state.t_chain().len();
        Ok(JgStatus::Ok)
    })
}

/// Whether the chain was cut short by a bound.
///
/// # Safety
/// `session` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn jg_session_truncated(session: *const JgSession, out: *mut bool) -> JgStatus {
    guard(|| {
        null_out(out, "out")?;
        *out = self::session(session)?.state.flags().truncated();
        Ok(JgStatus::Ok)
    })
}

/// The full JSON report, as written by `jumpgen build --json`.
///
/// # Safety
/// `session` must be live and `out` valid. Free the result with `jg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn jg_session_report_json(session: *const JgSession, out: *mut *mut c_char) -> JgStatus {
    guard(|| {
        null_out(out, "out")?;
        *out = ptr::null_mut();
        let s = self::session(session)?;
        let report = ReportDoc::build(&s.config, &s.state).map_err(|e| Fail(JgStatus::Internal, e.to_string()))?;
        hand_out(out, report.to_json())
    })
}

/// Generators of the ideal of monomials with value at least `sigma`, as JSON.
///
/// # Safety
/// `session` must be live, `sigma` NUL-terminated and `out` valid.
/// Free the result with `jg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn jg_session_ideal_json(
    session: *const JgSession,
    sigma: *const c_char,
    out: *mut *mut c_char,
) -> JgStatus {
    guard(|| {
        null_out(out, "out")?;
        *out = ptr::null_mut();
        let s = self::session(session)?;
        let src = text(sigma, "sigma")?;
        let sigma = Value::parse(s.config.model.basis(), src).map_err(|e| Fail(JgStatus::Config, format!("sigma: {e}")))?;
        if sigma.is_negative() {
            return Err(Fail(JgStatus::Config, "sigma must be nonnegative".into()));
        }
        let row = ideal_rows(&s.state, &s.config, &sigma).map_err(|e| Fail(JgStatus::Internal, e.to_string()))?;
        let json = serde_json::to_string(&row).map_err(|e| Fail(JgStatus::Internal, e.to_string()))?;
        hand_out(out, json)
    })
}

/// Rebuilds the bundled example and compares it with its reference data.
/// Returns `Mismatch` and a listing in `jg_last_error` when they differ.
#[no_mangle]
pub extern "C" fn jg_verify_example() -> JgStatus {
    guard(|| {
        let diffs = verify_example(EXAMPLE_GOLDEN).map_err(|e| Fail(JgStatus::Internal, e.to_string()))?;
        if diffs.is_empty() {
            Ok(JgStatus::Ok)
        } else {
            let msg = diffs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n");
            Err(Fail(JgStatus::Mismatch, msg))
        }
    })
}

/// Message for the last failed call on this thread, or null.
/// The pointer stays valid until the next library call on the thread.
#[no_mangle]
pub extern "C" fn jg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is accepted.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn jg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
