//! C interface to the Rascal Light interpreter.
//!
//! A module is loaded once with [`rl_module_parse`], which also runs its
//! global initializers. Every [`rl_eval`] or [`rl_call`] then starts from
//! that initial store, so calls do not observe each other's assignments.
//!
//! Strings handed out by this library are owned by the caller and must be
//! released with [`rl_string_free`]. No function panics across the
//! boundary; an internal panic is reported as [`RlStatus::Panic`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rascal_light::cli::{exit_code, render_result};
use rascal_light::eval::{Fuel, ResourceExhausted};
use rascal_light::fuel::{apply_function, eval_expr_fuel, init_module_fuel, InitError};
use rascal_light::parser::{parse_expr, parse_module, parse_value};
use rascal_light::validate::Module;
use rascal_light::value::{ExRes, Store, VTRes};

/// Pass as `fuel` for evaluation without a fuel bound.
pub const RL_UNBOUNDED: u64 = u64::MAX;

/// Result codes. The evaluation codes agree with the exit status of the
/// `rlight` command line tool.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlStatus {
    /// Normal value or `return`.
    Ok = 0,
    /// The program threw a value.
    Throw = 2,
    /// Runtime error, or `break`, `continue` or `fail` escaping.
    Error = 3,
    /// The fuel ran out.
    Timeout = 4,
    /// Source text did not parse or validate.
    Load = 5,
    /// Recursion depth of the host exceeded.
    Resource = 6,
    /// A null pointer, invalid UTF-8 or an unknown function name.
    InvalidArgument = 64,
    /// Internal failure inside the library.
    Panic = 70,
}

impl RlStatus {
    fn from_code(code: i32) -> RlStatus {
        match code {
            0 => RlStatus::Ok,
            2 => RlStatus::Throw,
            3 => RlStatus::Error,
            4 => RlStatus::Timeout,
            6 => RlStatus::Resource,
            _ => RlStatus::Load,
        }
    }
}

/// A validated module together with the store its initializers built.
pub struct RlModule {
    module: Module,
    store: Store,
}

type Reply = (RlStatus, String);

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Reply> {
    if p.is_null() {
        return Err((RlStatus::InvalidArgument, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RlStatus::InvalidArgument, "string is not UTF-8".into()))
}

/// Stores `s` in `*out` when `out` is not null.
unsafe fn hand_out(out: *mut *mut c_char, s: String) {
    if out.is_null() {
        return;
    }
    let s = CString::new(s.replace('\0', "\\0")).expect("no interior nul");
    *out = s.into_raw();
}

/// Runs `f`, converting panics, and writes its message to `out`.
unsafe fn guarded(out: *mut *mut c_char, f: impl FnOnce() -> Result<Reply, Reply>) -> RlStatus {
    if !out.is_null() {
        *out = ptr::null_mut();
    }
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(r) | Err(r)) => r,
        Err(_) => (RlStatus::Panic, "internal error".into()),
    };
    hand_out(out, msg);
    status
}

fn outcome(r: Result<(VTRes, Store), ResourceExhausted>) -> Reply {
    match r {
        Ok((res, _)) => {
            let mut msg = render_result(&res);
            if let VTRes::Done(Err(ExRes::Error(e))) = &res {
                msg = format!("error at {}: {e}", e.span);
            }
            (RlStatus::from_code(exit_code(&res)), msg)
        }
        Err(e) => (RlStatus::Resource, e.to_string()),
    }
}

/// Parses and validates `source`, then runs its global initializers with
/// `fuel`. On success `*module` receives a handle. `*message` (when not
/// null) receives `"ok"` or a diagnostic.
///
/// # Safety
/// `source` must be a valid nul-terminated string. `module` and `message`
/// must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rl_module_parse(
    source: *const c_char,
    fuel: u64,
    module: *mut *mut RlModule,
    message: *mut *mut c_char,
) -> RlStatus {
    if !module.is_null() {
        *module = ptr::null_mut();
    }
    guarded(message, || {
        if module.is_null() {
            return Err((RlStatus::InvalidArgument, "null module slot".into()));
        }
        let src = text(source)?;
        let def = parse_module(src).map_err(|e| (RlStatus::Load, format!("parse error at {}: {e}", e.span)))?;
        let m = Module::new(def).map_err(|errs| {
            let lines: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
            (RlStatus::Load, lines.join("\n"))
        })?;
        let store = init_module_fuel(&m, fuel).map_err(|e| {
            let status = match &e {
                InitError::Exceptional { result, .. } => {
                    RlStatus::from_code(exit_code(&VTRes::Done(Err(result.clone()))))
                }
                InitError::TypeMismatch(_) => RlStatus::Error,
                InitError::Timeout(_) => RlStatus::Timeout,
                InitError::Resource(_) => RlStatus::Resource,
            };
            (status, e.to_string())
        })?;
        *module = Box::into_raw(Box::new(RlModule { module: m, store }));
        Ok((RlStatus::Ok, "ok".into()))
    })
}

/// Evaluates the expression `expr` in the scope of the module's globals.
/// `*result` receives the rendered outcome, e.g. `3`, `throw nokey(3)` or
/// `timeout`.
///
/// # Safety
/// `module` must come from [`rl_module_parse`] and not be freed. `expr`
/// must be a valid nul-terminated string, `result` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rl_eval(
    module: *const RlModule,
    expr: *const c_char,
    fuel: u64,
    result: *mut *mut c_char,
) -> RlStatus {
    guarded(result, || {
        let m = module.as_ref().ok_or((RlStatus::InvalidArgument, "null module".to_string()))?;
        let src = text(expr)?;
        let e = parse_expr(src).map_err(|e| (RlStatus::Load, format!("parse error at {}: {e}", e.span)))?;
        let e = m.module.resolve_expr(e).map_err(|errs| {
            let lines: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
            (RlStatus::Load, lines.join("\n"))
        })?;
        Ok(outcome(eval_expr_fuel(&m.module, &e, &m.store, fuel as Fuel)))
    })
}

/// Calls function `name` with `argc` arguments, each a value literal such
/// as `[1, 2]` or `succ(zero())`.
///
/// # Safety
/// `module` must come from [`rl_module_parse`]. `name` and the `argc`
/// entries of `argv` must be valid nul-terminated strings; `argv` may be
/// null when `argc` is 0. `result` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rl_call(
    module: *const RlModule,
    name: *const c_char,
    argv: *const *const c_char,
    argc: usize,
    fuel: u64,
    result: *mut *mut c_char,
) -> RlStatus {
    guarded(result, || {
        let m = module.as_ref().ok_or((RlStatus::InvalidArgument, "null module".to_string()))?;
        let name = text(name)?;
        let Some(f) = m.module.function(name) else {
            return Err((RlStatus::InvalidArgument, format!("no function named `{name}`")));
        };
        if argc > 0 && argv.is_null() {
            return Err((RlStatus::InvalidArgument, "null argument array".into()));
        }
        if f.params.len() != argc {
            return Err((
                RlStatus::InvalidArgument,
                format!("`{name}` takes {} argument(s), {argc} given", f.params.len()),
            ));
        }
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            let a = text(*argv.add(i))?;
            let v = parse_value(a).map_err(|e| (RlStatus::Load, format!("argument {i}: {e}")))?;
            args.push(v);
        }
        Ok(outcome(apply_function(&m.module, &m.store, name, args, fuel as Fuel)))
    })
}

/// Releases a module handle. Null is ignored.
///
/// # Safety
/// `module` must be null or come from [`rl_module_parse`], and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_module_free(module: *mut RlModule) {
    if !module.is_null() {
        drop(Box::from_raw(module));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string handed out by this library, and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
