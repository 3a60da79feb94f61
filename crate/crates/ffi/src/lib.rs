//! C ABI over `limbel`.
//!
//! Instances are opaque `LbInstance` handles owned by the caller and released
//! with `lb_instance_free`. Every fallible call returns an `LbStatus`; on
//! anything but `LB_STATUS_OK` the message is available from `lb_last_error`
//! on the same thread until the next failing call. Strings returned through
//! out-parameters are released with `lb_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use limbel::format::{parse_problem, print_problem};
use limbel::netlist::parse_circuit;
use limbel::oracle::entails_query;
use limbel::qbf::parse_qdimacs;
use limbel::reduce::{reduce_qbf, reduce_qmcs, reduce_wamcs_complement, reduce_wmcs};
use limbel::solver::{decide, render_trace, Instance, Options};

/// Cache belief results per setup while deciding.
pub const LB_FLAG_MEMO: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LbStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Solve = 4,
    Oracle = 5,
    Reduce = 6,
    Print = 7,
    BadMode = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LbCircuitMode {
    Qmcs = 0,
    Wmcs = 1,
    Wamcs = 2,
}

/// Opaque problem handle.
pub struct LbInstance {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LbStatus, String);

fn fail<E: std::fmt::Display>(status: LbStatus) -> impl FnOnce(E) -> Failure {
    move |e| Failure(status, e.to_string())
}

/// Runs `body`, recording any failure or panic as the last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LbStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LbStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LbStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(fail(LbStatus::InvalidUtf8))
}

unsafe fn instance<'a>(p: *const LbInstance) -> Result<&'a Instance, Failure> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(LbStatus::NullArgument, "instance is null".into()))
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(LbStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

fn boxed(inst: Instance) -> *mut LbInstance {
    Box::into_raw(Box::new(LbInstance { inner: inst }))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failing call on this thread, or NULL.
#[no_mangle]
pub extern "C" fn lb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a problem file.
///
/// # Safety
/// `problem` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_instance_parse(problem: *const c_char, out: *mut *mut LbInstance) -> LbStatus {
    guard(|| {
        let inst = parse_problem(text(problem, "problem")?).map_err(fail(LbStatus::Parse))?;
        store(out, boxed(inst))
    })
}

/// Releases an instance; NULL is ignored.
///
/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lb_instance_free(inst: *mut LbInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Belief level of the instance.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_instance_level(inst: *const LbInstance, out: *mut u32) -> LbStatus {
    guard(|| store(out, instance(inst)?.level))
}

/// Overrides the belief level; rejected for queries with belief atoms.
///
/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lb_instance_set_level(inst: *mut LbInstance, level: u32) -> LbStatus {
    guard(|| {
        let h = inst
            .as_mut()
            .ok_or_else(|| Failure(LbStatus::NullArgument, "instance is null".into()))?;
        let candidate = Instance { level, ..h.inner.clone() };
        candidate.validate().map_err(fail(LbStatus::Solve))?;
        h.inner = candidate;
        Ok(())
    })
}

/// Decides the instance; `flags` is a combination of `LB_FLAG_*`.
///
/// # Safety
/// `inst` must be a live handle and `answer` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_decide(inst: *const LbInstance, flags: u32, answer: *mut bool) -> LbStatus {
    guard(|| {
        let options = Options { memo: flags & LB_FLAG_MEMO != 0, trace: false };
        let v = decide(instance(inst)?, options).map_err(fail(LbStatus::Solve))?;
        store(answer, v.answer)
    })
}

/// Like `lb_decide`, also returning the rendered split tree.
///
/// # Safety
/// `inst` must be a live handle; `answer` and `trace` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lb_decide_trace(
    inst: *const LbInstance,
    flags: u32,
    answer: *mut bool,
    trace: *mut *mut c_char,
) -> LbStatus {
    guard(|| {
        let options = Options { memo: flags & LB_FLAG_MEMO != 0, trace: true };
        let v = decide(instance(inst)?, options).map_err(fail(LbStatus::Solve))?;
        let rendered = render_trace(v.trace.as_deref().unwrap_or_default());
        if trace.is_null() {
            return Err(Failure(LbStatus::NullArgument, "trace pointer is null".into()));
        }
        store(answer, v.answer)?;
        store(trace, c_string(rendered))
    })
}

/// Classical entailment of the query by the knowledge base.
///
/// # Safety
/// `inst` must be a live handle and `answer` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_oracle(inst: *const LbInstance, answer: *mut bool) -> LbStatus {
    guard(|| {
        let inst = instance(inst)?;
        let yes = entails_query(&inst.kb, &inst.query).map_err(fail(LbStatus::Oracle))?;
        store(answer, yes)
    })
}

/// Canonical problem-file text.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_instance_print(inst: *const LbInstance, out: *mut *mut c_char) -> LbStatus {
    guard(|| {
        let text = print_problem(instance(inst)?).map_err(fail(LbStatus::Print))?;
        store(out, c_string(text))
    })
}

/// Encodes a QDIMACS formula as a problem instance.
///
/// # Safety
/// `qdimacs` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_reduce_qbf(qdimacs: *const c_char, out: *mut *mut LbInstance) -> LbStatus {
    guard(|| {
        let q = parse_qdimacs(text(qdimacs, "qdimacs")?).map_err(fail(LbStatus::Parse))?;
        let inst = reduce_qbf(&q).map_err(fail(LbStatus::Reduce))?;
        store(out, boxed(inst))
    })
}

/// Encodes a circuit netlist; weighted modes take `k` from its single weight.
///
/// # Safety
/// `netlist` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lb_reduce_circuit(
    netlist: *const c_char,
    mode: LbCircuitMode,
    out: *mut *mut LbInstance,
) -> LbStatus {
    guard(|| {
        let c = parse_circuit(text(netlist, "netlist")?).map_err(fail(LbStatus::Parse))?;
        let single = || match c.weights() {
            [k] => Ok(*k),
            ws => Err(Failure(LbStatus::BadMode, format!("mode needs exactly one block, found {}", ws.len()))),
        };
        let inst = match mode {
            LbCircuitMode::Qmcs => reduce_qmcs(&c),
            LbCircuitMode::Wmcs => reduce_wmcs(&c, single()?),
            LbCircuitMode::Wamcs => reduce_wamcs_complement(&c, single()?),
        }
        .map_err(fail(LbStatus::Reduce))?;
        store(out, boxed(inst))
    })
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
