#![allow(dead_code)]

use std::path::PathBuf;

use rascal_light::ast::Expr;
use rascal_light::eval::{eval_expr, UNBOUNDED};
use rascal_light::fuel::{apply_function, init_module};
use rascal_light::parser::{parse_expr, parse_module, parse_value};
use rascal_light::validate::Module;
use rascal_light::value::{Store, VRes, VTRes, Value};

pub fn program_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs").join(name)
}

pub fn module(src: &str) -> Module {
    let def = parse_module(src).unwrap_or_else(|e| panic!("parse error {e} in\n{src}"));
    Module::new(def).unwrap_or_else(|errs| panic!("ill formed: {errs:?}"))
}

pub fn program(name: &str) -> Module {
    let src = std::fs::read_to_string(program_path(name)).expect("program file");
    module(&src)
}

pub fn value(src: &str) -> Value {
    parse_value(src).unwrap_or_else(|e| panic!("bad value literal {src}: {e}"))
}

/// Parses `src` and resolves it against the module's globals.
pub fn snippet(m: &Module, src: &str) -> Expr {
    let e = parse_expr(src).unwrap_or_else(|e| panic!("parse error {e} in {src}"));
    m.resolve_expr(e).unwrap_or_else(|errs| panic!("ill formed: {errs:?}"))
}

/// Evaluates `src` after initializing the module's globals.
pub fn eval_in(m: &Module, src: &str) -> (VRes, Store) {
    let e = snippet(m, src);
    let store = init_module(m).expect("globals initialize");
    eval_expr(m, &e, &store).expect("within resource limits")
}

/// Evaluates `src` against a module declaring `decls`.
pub fn eval_with(decls: &str, src: &str) -> VRes {
    eval_in(&module(decls), src).0
}

pub fn eval(src: &str) -> VRes {
    eval_with("", src)
}

pub fn call(m: &Module, name: &str, args: &[&str]) -> VTRes {
    let store = init_module(m).expect("globals initialize");
    let args = args.iter().map(|a| value(a)).collect();
    apply_function(m, &store, name, args, UNBOUNDED).expect("within resource limits").0
}

pub fn ok(v: &str) -> VRes {
    Ok(value(v))
}
