//! Fuel-bounded entry points, module initialization and fuel search.

use crate::ast::{Case, Expr, Span};
use crate::eval::{settle, Fuel, Interpreter, Interrupt, Limits, ResourceExhausted, TraceSink, UNBOUNDED};
use crate::typing::conforms;
use crate::validate::Module;
use crate::value::{ErrorKind, ExRes, RuntimeError, Store, VRes, VTRes, Value};

fn to_vtres(r: Result<Value, Interrupt>, limits: Limits) -> Result<VTRes, ResourceExhausted> {
    match r {
        Err(Interrupt::Timeout) => Ok(VTRes::Timeout),
        r => settle(r, limits).map(VTRes::Done),
    }
}

/// Evaluates `e` with at most `fuel` nested judgments.
pub fn eval_expr_fuel(
    module: &Module,
    e: &Expr,
    store: &Store,
    fuel: Fuel,
) -> Result<(VTRes, Store), ResourceExhausted> {
    run_expr(Interpreter::new(module), e, store, fuel)
}

/// [`eval_expr_fuel`] with a cap on the total number of judgments.
pub fn eval_expr_bounded(
    module: &Module,
    e: &Expr,
    store: &Store,
    fuel: Fuel,
    max_steps: u64,
) -> Result<(VTRes, Store), ResourceExhausted> {
    run_expr(Interpreter::new(module).with_step_limit(max_steps), e, store, fuel)
}

fn run_expr(
    mut it: Interpreter<'_>,
    e: &Expr,
    store: &Store,
    fuel: Fuel,
) -> Result<(VTRes, Store), ResourceExhausted> {
    let mut s = store.clone();
    let r = it.expr(e, &mut s, fuel);
    Ok((to_vtres(r, it.limits())?, s))
}

/// Runs the cases judgment on `v` with fuel and an optional step cap.
pub fn eval_cases_fuel(
    module: &Module,
    cs: &[Case],
    v: &Value,
    store: &Store,
    fuel: Fuel,
    max_steps: Option<u64>,
) -> Result<(VTRes, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    if let Some(n) = max_steps {
        it = it.with_step_limit(n);
    }
    let mut s = store.clone();
    let r = it.cases(cs, v, &mut s, fuel, Span::default());
    Ok((to_vtres(r, it.limits())?, s))
}

/// Like [`eval_expr_fuel`] but reports every rule application to `sink`.
pub fn eval_expr_traced(
    module: &Module,
    e: &Expr,
    store: &Store,
    fuel: Fuel,
    sink: &mut dyn TraceSink,
) -> Result<(VTRes, Store), ResourceExhausted> {
    run_expr(Interpreter::new(module).with_trace(sink), e, store, fuel)
}

/// Calls function `name` on already evaluated arguments, as if by a call
/// expression whose arguments were literals.
pub fn apply_function(
    module: &Module,
    store: &Store,
    name: &str,
    args: Vec<Value>,
    fuel: Fuel,
) -> Result<(VTRes, Store), ResourceExhausted> {
    apply_with(Interpreter::new(module), store, name, args, fuel)
}

pub fn apply_function_traced(
    module: &Module,
    store: &Store,
    name: &str,
    args: Vec<Value>,
    fuel: Fuel,
    sink: &mut dyn TraceSink,
) -> Result<(VTRes, Store), ResourceExhausted> {
    apply_with(Interpreter::new(module).with_trace(sink), store, name, args, fuel)
}

fn apply_with(
    mut it: Interpreter<'_>,
    store: &Store,
    name: &str,
    args: Vec<Value>,
    fuel: Fuel,
) -> Result<(VTRes, Store), ResourceExhausted> {
    let module = it.module;
    let mut s = store.clone();
    let r = match module.function(name) {
        None => Err(Interrupt::Exc(ExRes::Error(RuntimeError::new(
            ErrorKind::Undefined(name.into()),
            Span::default(),
        )))),
        Some(_) if fuel == 0 => Err(Interrupt::Timeout),
        Some(fun) => it.call(fun, args, &mut s, fuel - 1, fun.span),
    };
    let limits = it.limits();
    Ok((to_vtres(r, limits)?, s))
}

/// Initialization of one global did not produce a conforming value.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InitError {
    #[error("initializer of global `{name}` ended with {}", .result.kind_name())]
    Exceptional { name: crate::ast::Name, result: ExRes },
    #[error("initializer of global `{0}` produced a value outside its declared type")]
    TypeMismatch(crate::ast::Name),
    #[error("initializer of global `{0}` ran out of fuel")]
    Timeout(crate::ast::Name),
    #[error(transparent)]
    Resource(#[from] ResourceExhausted),
}

/// Evaluates the global initializers in declaration order, each with the
/// globals before it in scope.
pub fn init_module(module: &Module) -> Result<Store, InitError> {
    init_module_fuel(module, UNBOUNDED)
}

/// [`init_module`] where each initializer gets `fuel`.
pub fn init_module_fuel(module: &Module, fuel: Fuel) -> Result<Store, InitError> {
    let mut store = Store::new();
    for g in &module.def().globals {
        let (r, s) = eval_expr_fuel(module, &g.init, &store, fuel)?;
        store = s;
        match r {
            VTRes::Done(Ok(v)) => {
                if !conforms(&v, &g.ty, module.data()) {
                    return Err(InitError::TypeMismatch(g.name.clone()));
                }
                store.insert(g.name.clone(), v);
            }
            VTRes::Done(Err(result)) => {
                return Err(InitError::Exceptional {
                    name: g.name.clone(),
                    result,
                })
            }
            VTRes::Timeout => return Err(InitError::Timeout(g.name.clone())),
        }
    }
    Ok(store)
}

/// The search for the least sufficient fuel gave up.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FuelError {
    #[error("no fuel up to {0} was sufficient")]
    Exceeded(Fuel),
    #[error(transparent)]
    Resource(#[from] ResourceExhausted),
}

/// Outcome of [`min_sufficient_fuel`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuelSearch {
    pub fuel: Fuel,
    pub result: VRes,
    pub store: Store,
}

/// Finds the least fuel under which `e` does not time out, searching up to
/// `cap`. Runs are monotone in fuel, so doubling followed by bisection finds
/// the boundary.
pub fn min_sufficient_fuel(
    module: &Module,
    e: &Expr,
    store: &Store,
    cap: Fuel,
) -> Result<FuelSearch, FuelError> {
    let run = |n: Fuel| eval_expr_fuel(module, e, store, n);
    let mut hi: Fuel = 1;
    let found = loop {
        let (r, s) = run(hi)?;
        if let VTRes::Done(r) = r {
            break (r, s);
        }
        if hi >= cap {
            return Err(FuelError::Exceeded(cap));
        }
        hi = hi.saturating_mul(2).min(cap);
    };
    let mut lo = hi / 2; // times out, or zero
    let mut best = found;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match run(mid)? {
            (VTRes::Done(r), s) => {
                hi = mid;
                best = (r, s);
            }
            (VTRes::Timeout, _) => lo = mid,
        }
    }
    Ok(FuelSearch {
        fuel: hi,
        result: best.0,
        store: best.1,
    })
}
