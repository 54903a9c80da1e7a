//! C ABI over `horn_limits`.
//!
//! Programs live behind an opaque [`HlProgram`] handle. Every fallible call
//! returns an [`HlStatus`]; on failure [`hl_last_error`] describes the cause.
//! Strings handed out by this library must be released with
//! [`hl_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use horn_limits::decider::Membership;
use horn_limits::metric::{perturbation_family, stability_probe};
use horn_limits::report;
use horn_limits::{
    bounded_least_model, check_program, clause_limits, decide_membership, distance, model_limit_comparison,
    parse_ground_atom, parse_interpretation, parse_program, DyadicDistance, Error, Program, SequenceSchema,
};
use libc::c_char;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Input text was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Program, atom, interpretation or schema text failed to parse.
    Parse = 3,
    /// The operation needs a program that passes the guard checks.
    Uncertified = 4,
    /// A numeric argument or input combination was rejected.
    InvalidArgument = 5,
    /// A panic was caught at the boundary.
    Internal = 6,
}

/// Opaque parsed program.
pub struct HlProgram {
    inner: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> HlStatus {
    match e {
        Error::Syntax { .. } | Error::Arity { .. } | Error::GoalClause { .. } | Error::NonGround { .. } | Error::Schema(_) => {
            HlStatus::Parse
        }
        Error::Uncertified(_) | Error::NonFinitary { .. } => HlStatus::Uncertified,
        _ => HlStatus::InvalidArgument,
    }
}

struct Failure(HlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            HlStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(HlStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(HlStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const HlProgram) -> Result<&'a Program, Failure> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(HlStatus::NullArgument, "program handle is null".into()))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(HlStatus::NullArgument, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Failure(HlStatus::Internal, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(HlStatus::NullArgument, "output pointer is null".into()));
    }
    *out = value;
    Ok(())
}

fn positive(value: u32, what: &str) -> Result<u32, Failure> {
    if value == 0 {
        Err(Failure(HlStatus::InvalidArgument, format!("{what} must be positive")))
    } else {
        Ok(value)
    }
}

/// Parses program text. On success `*out` owns a handle to free with
/// [`hl_program_free`].
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_program_parse(source: *const c_char, out: *mut *mut HlProgram) -> HlStatus {
    guarded(|| {
        let src = text(source, "source")?;
        let inner = parse_program(src)?;
        put(out, Box::into_raw(Box::new(HlProgram { inner })))
    })
}

/// # Safety
/// `program` must be null or a handle from [`hl_program_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hl_program_free(program: *mut HlProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of distinct clauses, or 0 for a null handle.
///
/// # Safety
/// `program` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hl_program_clause_count(program: *const HlProgram) -> usize {
    program.as_ref().map_or(0, |h| h.inner.len())
}

/// Runs the guard checks. `*certified` is set to whether every clause passes
/// both; `*report_json` (if non-null) receives the per-clause report.
///
/// # Safety
/// `program` must be a live handle, `certified` writable, and `report_json`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn hl_guard_check(
    program: *const HlProgram,
    certified: *mut bool,
    report_json: *mut *mut c_char,
) -> HlStatus {
    guarded(|| {
        let r = check_program(handle(program)?);
        if !report_json.is_null() {
            put_string(report_json, report::to_json(&report::GuardJson::from(&r)))?;
        }
        put(certified, r.certified())
    })
}

/// Least model restricted to levels `<= depth`, one atom per line in
/// canonical order.
///
/// # Safety
/// `program` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_least_model(program: *const HlProgram, depth: u32, out: *mut *mut c_char) -> HlStatus {
    guarded(|| {
        let r = bounded_least_model(handle(program)?, positive(depth, "depth")?)?;
        put_string(out, r.model.to_string())
    })
}

/// Decides membership of a ground atom. `*member` is set on success and
/// `*proof_json` (if non-null) receives the full verdict with proof tree.
///
/// # Safety
/// `program` must be a live handle, `query` NUL-terminated, `member`
/// writable and `proof_json` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hl_decide(
    program: *const HlProgram,
    query: *const c_char,
    member: *mut bool,
    proof_json: *mut *mut c_char,
) -> HlStatus {
    guarded(|| {
        let p = handle(program)?;
        let q = parse_ground_atom(text(query, "query")?)?;
        let v = decide_membership(p, &q)?;
        if !proof_json.is_null() {
            put_string(proof_json, report::to_json(&report::VerdictJson::new(q.as_str(), &v)))?;
        }
        put(member, v.status == Membership::In)
    })
}

/// Distance between two interpretations given as text, written as `0`,
/// `2^-n` or `<=2^-n`.
///
/// # Safety
/// Both inputs must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_distance(i: *const c_char, j: *const c_char, out: *mut *mut c_char) -> HlStatus {
    guarded(|| {
        let i = parse_interpretation(text(i, "first interpretation")?)?;
        let j = parse_interpretation(text(j, "second interpretation")?)?;
        put_string(out, distance(&i, &j).to_string())
    })
}

/// Clause limits of a sequence schema (JSON) and, when the limit exists,
/// the comparison of least models at `depth` over indices `1..=horizon`.
///
/// # Safety
/// `schema_json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_limit_report(
    schema_json: *const c_char,
    depth: u32,
    horizon: u64,
    out: *mut *mut c_char,
) -> HlStatus {
    guarded(|| {
        let schema = SequenceSchema::from_json(text(schema_json, "schema")?)?;
        let depth = positive(depth, "depth")?;
        if horizon == 0 {
            return Err(Failure(HlStatus::InvalidArgument, "horizon must be positive".into()));
        }
        let limits = clause_limits(&schema);
        let models = if limits.limit_exists {
            Some(model_limit_comparison(&schema, depth, horizon)?)
        } else {
            None
        };
        let json = report::LimitReportJson {
            limit: report::LimitJson::from(&limits),
            models: models.as_ref().map(report::ModelLimitJson::from),
        };
        put_string(out, report::to_json(&json))
    })
}

/// Probes the bounded least model at `depth` with every single-atom
/// perturbation whose level lies in `level_lo..=level_hi`, using
/// `epsilon = 2^-eps_exponent`. Writes the JSON report.
///
/// # Safety
/// `program` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_stability(
    program: *const HlProgram,
    eps_exponent: u32,
    level_lo: u32,
    level_hi: u32,
    steps: u32,
    depth: u32,
    out: *mut *mut c_char,
) -> HlStatus {
    guarded(|| {
        let p = handle(program)?;
        let depth = positive(depth, "depth")?;
        let eps = DyadicDistance::Exp(positive(eps_exponent, "epsilon exponent")?);
        let steps = positive(steps, "steps")?;
        let j = bounded_least_model(p, depth)?.model;
        let family = perturbation_family(&j, p.signature(), positive(level_lo, "lowest level")?..=level_hi)?;
        let r = stability_probe(p, &j, &family, eps, steps as usize, depth)?;
        put_string(out, report::to_json(&report::StabilityJson::from(&r)))
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
