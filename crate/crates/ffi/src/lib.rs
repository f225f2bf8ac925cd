//! C ABI over `qubo-arena`.
//!
//! Problems and runs are opaque heap handles (`QaQubo`, `QaRun`) released with
//! their `_free` functions. Fallible calls return a [`QaStatus`] and write
//! results through out-pointers; on failure the message is available from
//! [`qa_last_error_message`] on the same thread.
//!
//! The generated header lives in `include/qubo_arena.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qubo_arena::instances::{gen_nae3sat, gen_sk, parse_mqlib, write_mqlib};
use qubo_arena::rng::RngSeed;
use qubo_arena::solvers::{solve, ParamMap, SolveRun, SolverBudget, SolverKind};
use qubo_arena::{BinaryAssignment, Error, QuboBuilder, QuboProblem};

/// Opaque QUBO problem.
pub struct QaQubo(QuboProblem);

/// Opaque solver result.
pub struct QaRun(SolveRun);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Parse = 4,
    Capacity = 5,
    Io = 6,
    Internal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> QaStatus {
    match e {
        Error::Dimension { .. } | Error::IndexOutOfRange { .. } => QaStatus::Dimension,
        Error::InvalidParameter(_) | Error::Validation(_) | Error::UnknownSolver(_) => {
            QaStatus::InvalidArgument
        }
        Error::Parse { .. } | Error::Json(_) => QaStatus::Parse,
        Error::Capacity(_) => QaStatus::Capacity,
        Error::Io(_) => QaStatus::Io,
    }
}

struct Fail(QaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QaStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(QaStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QaStatus::Internal
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn qubo<'a>(p: *const QaQubo) -> Result<&'a QuboProblem, Fail> {
    p.as_ref().map(|q| &q.0).ok_or_else(|| null("problem"))
}

unsafe fn run<'a>(p: *const QaRun) -> Result<&'a SolveRun, Fail> {
    p.as_ref().map(|r| &r.0).ok_or_else(|| null("run"))
}

unsafe fn put_qubo(out: *mut *mut QaQubo, p: QuboProblem) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(QaQubo(p)));
    Ok(())
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = v;
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance in the text format used by `qubo-arena gen`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_qubo_parse(text: *const c_char, out: *mut *mut QaQubo) -> QaStatus {
    guard(|| {
        let text = c_str(text, "text")?;
        let (p, _) = parse_mqlib(text)?;
        put_qubo(out, p)
    })
}

/// Builds a problem from parallel arrays of `(i, j, q)` triplets. Pairs with
/// `j < i` are mirrored and repeated pairs are summed.
///
/// # Safety
/// `is`, `js` and `qs` must each hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_qubo_from_entries(
    n: usize,
    is: *const u32,
    js: *const u32,
    qs: *const f64,
    len: usize,
    offset: f64,
    out: *mut *mut QaQubo,
) -> QaStatus {
    guard(|| {
        let (is, js, qs) = (slice(is, len, "is")?, slice(js, len, "js")?, slice(qs, len, "qs")?);
        let mut b = QuboBuilder::new(n);
        for k in 0..len {
            b.add(is[k] as usize, js[k] as usize, qs[k])?;
        }
        b.add_offset(offset);
        put_qubo(out, b.build()?)
    })
}

/// Random NAE 3-SAT instance with `n` variables and `m` clauses, QUBO form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_gen_nae3sat(n: usize, m: usize, seed: u64, out: *mut *mut QaQubo) -> QaStatus {
    guard(|| put_qubo(out, gen_nae3sat(n, m, RngSeed(seed))?.to_ising().to_qubo()))
}

/// Sherrington-Kirkpatrick instance on `n` spins, QUBO form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_gen_sk(n: usize, seed: u64, out: *mut *mut QaQubo) -> QaStatus {
    guard(|| put_qubo(out, gen_sk(n, RngSeed(seed))?.to_qubo()))
}

/// Number of variables, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_qubo_num_vars(p: *const QaQubo) -> usize {
    p.as_ref().map_or(0, |q| q.0.num_vars())
}

/// Energy of a 0/1 assignment of length `len`.
///
/// # Safety
/// `p` must be a live handle, `x` must hold `len` bytes, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_qubo_energy(p: *const QaQubo, x: *const u8, len: usize, out: *mut f64) -> QaStatus {
    guard(|| {
        let p = qubo(p)?;
        let x = slice(x, len, "x")?;
        if x.iter().any(|&b| b > 1) {
            return Err(invalid("assignment entries must be 0 or 1"));
        }
        put(out, p.energy(&BinaryAssignment(x.to_vec()))?)
    })
}

/// Energy change from flipping bit `k` of `x`.
///
/// # Safety
/// As for [`qa_qubo_energy`].
#[no_mangle]
pub unsafe extern "C" fn qa_qubo_flip_delta(
    p: *const QaQubo,
    x: *const u8,
    len: usize,
    k: usize,
    out: *mut f64,
) -> QaStatus {
    guard(|| {
        let p = qubo(p)?;
        let x = slice(x, len, "x")?;
        if x.iter().any(|&b| b > 1) {
            return Err(invalid("assignment entries must be 0 or 1"));
        }
        put(out, p.flip_delta(&BinaryAssignment(x.to_vec()), k)?)
    })
}

/// Serialises the problem; free the string with [`qa_string_free`].
///
/// # Safety
/// `p` must be a live handle; `name` may be NULL; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_qubo_write(p: *const QaQubo, name: *const c_char, out: *mut *mut c_char) -> QaStatus {
    guard(|| {
        let p = qubo(p)?;
        let name = if name.is_null() { "" } else { c_str(name, "name")? };
        let s = CString::new(write_mqlib(p, name)).map_err(|_| invalid("name contains NUL"))?;
        put(out, s.into_raw())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn qa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `p` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn qa_qubo_free(p: *mut QaQubo) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs a solver (`"sa"`, `"pt"`, `"sb"` or `"exact"`).
///
/// `params` is NULL or `"key=value;key=value"`. A non-positive `time_limit`
/// and a zero `sweep_limit` mean "unset"; heuristics need at least one.
/// The trajectory is always recorded.
///
/// # Safety
/// `p` must be a live handle, strings NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qa_solve(
    p: *const QaQubo,
    solver: *const c_char,
    params: *const c_char,
    time_limit: f64,
    sweep_limit: u64,
    seed: u64,
    out: *mut *mut QaRun,
) -> QaStatus {
    guard(|| {
        let p = qubo(p)?;
        let kind: SolverKind = c_str(solver, "solver")?.parse()?;
        let params = if params.is_null() {
            ParamMap::new()
        } else {
            let text = c_str(params, "params")?;
            ParamMap::parse_pairs(text.split(';').map(str::trim).filter(|s| !s.is_empty()))?
        };
        let budget = SolverBudget {
            time_limit: (time_limit > 0.0).then_some(time_limit),
            sweep_limit: (sweep_limit > 0).then_some(sweep_limit),
            record_trajectory: true,
            seed: RngSeed(seed),
            target_energy: None,
        };
        let result = solve(kind, &params, p, &budget)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(QaRun(result)));
        Ok(())
    })
}

/// Best energy, or NaN for NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_run_energy(r: *const QaRun) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.best_energy)
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_run_num_vars(r: *const QaRun) -> usize {
    r.as_ref().map_or(0, |r| r.0.best_assignment.0.len())
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_run_sweeps(r: *const QaRun) -> u64 {
    r.as_ref().map_or(0, |r| r.0.sweeps_done)
}

/// Wall-clock seconds spent in the solver, or NaN for NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_run_elapsed(r: *const QaRun) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.elapsed)
}

/// Copies the best assignment into `buf` (`len` must be at least the variable count).
///
/// # Safety
/// `r` must be a live handle and `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qa_run_assignment(r: *const QaRun, buf: *mut u8, len: usize) -> QaStatus {
    guard(|| {
        let bits = &run(r)?.best_assignment.0;
        if len < bits.len() {
            return Err(Error::Dimension { expected: bits.len(), actual: len }.into());
        }
        if bits.is_empty() {
            return Ok(());
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(bits.as_ptr(), buf, bits.len());
        Ok(())
    })
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_run_trajectory_len(r: *const QaRun) -> usize {
    r.as_ref().map_or(0, |r| r.0.trajectory.len())
}

/// Copies the (elapsed, best energy) trajectory into two arrays of `len`.
///
/// # Safety
/// `r` must be a live handle; both buffers writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn qa_run_trajectory(
    r: *const QaRun,
    elapsed: *mut f64,
    energy: *mut f64,
    len: usize,
) -> QaStatus {
    guard(|| {
        let t = &run(r)?.trajectory;
        if len < t.len() {
            return Err(Error::Dimension { expected: t.len(), actual: len }.into());
        }
        if t.is_empty() {
            return Ok(());
        }
        if elapsed.is_null() || energy.is_null() {
            return Err(null("trajectory buffer"));
        }
        for (k, pt) in t.iter().enumerate() {
            *elapsed.add(k) = pt.elapsed;
            *energy.add(k) = pt.best_energy;
        }
        Ok(())
    })
}

/// # Safety
/// `r` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn qa_run_free(r: *mut QaRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
