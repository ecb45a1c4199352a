//! Big-step evaluation of expressions, cases, generators and function calls.
//!
//! All judgments take an explicit fuel argument. A judgment invoked with zero
//! fuel produces `timeout`, and every premise runs with one unit less than its
//! conclusion. Unbounded evaluation is the same machinery with `u64::MAX` fuel
//! plus a recursion-depth guard, so the fuel-bounded and unbounded evaluators
//! cannot drift apart.

use std::fmt;

use crate::ast::{Case, Expr, ExprKind, FunDef, Generator, Span};
use crate::ops::{apply_binary, apply_unary};
use crate::pattern::match_pattern;
use crate::typing::conforms;
use crate::validate::Module;
use crate::value::{
    last, map_update, Env, EnvRes, ErrorKind, ExRes, RuntimeError, Store, VRes, Value,
};

/// Units of fuel. Each judgment consumes one.
pub type Fuel = u64;

/// Fuel used by the unbounded entry points.
pub const UNBOUNDED: Fuel = u64::MAX;

/// Recursion limit for unbounded evaluation.
pub const DEFAULT_MAX_DEPTH: usize = 50_000;

const RED_ZONE: usize = 128 * 1024;
const STACK_SEGMENT: usize = 4 * 1024 * 1024;

/// Why a judgment stopped without an ordinary result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interrupt {
    Exc(ExRes),
    Timeout,
    DepthExceeded,
    StepsExceeded,
}

impl From<ExRes> for Interrupt {
    fn from(e: ExRes) -> Self {
        Interrupt::Exc(e)
    }
}

pub(crate) type Outcome<T> = Result<T, Interrupt>;

/// Evaluation hit a host resource limit. This is not an `error` result of
/// the program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ResourceExhausted {
    #[error("evaluation exceeded the maximum recursion depth of {limit}")]
    Depth { limit: usize },
    /// Only raised when a step budget was configured.
    #[error("evaluation exceeded the step budget of {limit}")]
    Steps { limit: u64 },
}

/// The resource limits of one interpreter, for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub depth: usize,
    pub steps: Option<u64>,
}

/// One rule application, reported to a [`TraceSink`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: &'static str,
    pub span: Span,
    pub outcome: &'static str,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @{} -> {}", self.rule, self.span, self.outcome)
    }
}

pub trait TraceSink {
    fn record(&mut self, event: TraceEvent);
}

impl TraceSink for Vec<TraceEvent> {
    fn record(&mut self, event: TraceEvent) {
        self.push(event);
    }
}

/// The evaluator state shared by all judgments of one run.
pub struct Interpreter<'a> {
    pub(crate) module: &'a Module,
    max_depth: usize,
    depth: usize,
    steps: u64,
    max_steps: Option<u64>,
    trace: Option<&'a mut dyn TraceSink>,
}

fn outcome_name<T>(r: &Outcome<T>) -> &'static str {
    match r {
        Ok(_) => "success",
        Err(Interrupt::Exc(x)) => x.kind_name(),
        Err(Interrupt::Timeout) => "timeout",
        Err(Interrupt::DepthExceeded) => "depth-exceeded",
        Err(Interrupt::StepsExceeded) => "steps-exceeded",
    }
}

/// Propagates an exceptional premise result, recording the congruence rule.
macro_rules! premise {
    ($self:ident, $rule:expr, $span:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(Interrupt::Exc(x)) => {
                $self.note($rule, $span, x.kind_name());
                return Err(Interrupt::Exc(x));
            }
            Err(other) => return Err(other),
        }
    };
}
pub(crate) use premise;

impl<'a> Interpreter<'a> {
    pub fn new(module: &'a Module) -> Self {
        Interpreter {
            module,
            max_depth: DEFAULT_MAX_DEPTH,
            depth: 0,
            steps: 0,
            max_steps: None,
            trace: None,
        }
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    /// Caps the total number of nested judgments. Fuel bounds only the
    /// height of a derivation, so a fuel-bounded run can still take time
    /// exponential in its fuel; property suites use this to stay bounded.
    pub fn with_step_limit(mut self, steps: u64) -> Self {
        self.max_steps = Some(steps);
        self
    }

    pub fn with_trace(mut self, sink: &'a mut dyn TraceSink) -> Self {
        self.trace = Some(sink);
        self
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn limits(&self) -> Limits {
        Limits {
            depth: self.max_depth,
            steps: self.max_steps,
        }
    }

    /// Judgments entered so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub(crate) fn note(&mut self, rule: &'static str, span: Span, outcome: &'static str) {
        if let Some(sink) = self.trace.as_deref_mut() {
            sink.record(TraceEvent {
                rule,
                span,
                outcome,
            });
        }
    }

    pub(crate) fn conclude<T>(&mut self, rule: &'static str, span: Span, r: Outcome<T>) -> Outcome<T> {
        if self.trace.is_some() && !matches!(
                r,
                Err(Interrupt::Timeout | Interrupt::DepthExceeded | Interrupt::StepsExceeded)
            ) {
            self.note(rule, span, outcome_name(&r));
        }
        r
    }

    pub(crate) fn error<T>(&mut self, rule: &'static str, span: Span, kind: ErrorKind) -> Outcome<T> {
        self.conclude(rule, span, Err(ExRes::Error(RuntimeError::new(kind, span)).into()))
    }

    /// Runs `f` one level deeper, growing the native stack when needed.
    pub(crate) fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> Outcome<T>) -> Outcome<T> {
        if self.depth >= self.max_depth {
            return Err(Interrupt::DepthExceeded);
        }
        self.steps += 1;
        if self.max_steps.is_some_and(|max| self.steps > max) {
            return Err(Interrupt::StepsExceeded);
        }
        self.depth += 1;
        let r = stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || f(self));
        self.depth -= 1;
        r
    }

    /// `e; σ ==eval n==> vres; σ'`
    pub fn expr(&mut self, e: &Expr, store: &mut Store, fuel: Fuel) -> Outcome<Value> {
        if fuel == 0 {
            return Err(Interrupt::Timeout);
        }
        self.nested(|me| me.expr_step(e, store, fuel - 1))
    }

    fn expr_step(&mut self, e: &Expr, store: &mut Store, m: Fuel) -> Outcome<Value> {
        let span = e.span;
        match &e.kind {
            ExprKind::Basic(b) => self.conclude("E-Val", span, Ok(Value::Basic(b.clone()))),
            ExprKind::Var(x) => match store.get(&x.name) {
                Some(v) => {
                    let v = v.clone();
                    self.conclude("E-Var-Sucs", span, Ok(v))
                }
                None => self.error("E-Var-Err", span, ErrorKind::UnboundVariable(x.name.clone())),
            },
            ExprKind::Unary(op, a) => {
                let v = premise!(self, "E-Un-Exc", span, self.expr(a, store, m));
                match apply_unary(*op, &v) {
                    Ok(r) => self.conclude("E-Un-Sucs", span, Ok(r)),
                    Err(k) => self.error("E-Un-Sucs", span, k),
                }
            }
            ExprKind::Binary(a, op, b) => {
                let v1 = premise!(self, "E-Bin-Exc1", span, self.expr(a, store, m));
                let v2 = premise!(self, "E-Bin-Exc2", span, self.expr(b, store, m));
                match apply_binary(*op, &v1, &v2) {
                    Ok(r) => self.conclude("E-Bin-Sucs", span, Ok(r)),
                    Err(k) => self.error("E-Bin-Sucs", span, k),
                }
            }
            ExprKind::Cons(k, args) => {
                let vs = premise!(self, "E-Cons-Exc", span, self.expr_star(args, store, m));
                let data = self.module.data();
                let well_typed = data.constructor(k).is_some_and(|sig| {
                    sig.arity() == vs.len()
                        && vs
                            .iter()
                            .zip(sig.field_types())
                            .all(|(v, t)| !v.is_bottom() && conforms(v, t, data))
                });
                if well_typed {
                    self.conclude("E-Cons-Sucs", span, Ok(Value::cons(k, vs)))
                } else {
                    self.error("E-Cons-Err", span, ErrorKind::ConstructorArgs(k.clone()))
                }
            }
            ExprKind::List(es) => {
                let vs = premise!(self, "E-List-Exc", span, self.expr_star(es, store, m));
                if vs.iter().any(Value::is_bottom) {
                    self.error("E-List-Err", span, ErrorKind::UndefinedElement)
                } else {
                    self.conclude("E-List-Sucs", span, Ok(Value::list(vs)))
                }
            }
            ExprKind::Set(es) => {
                let vs = premise!(self, "E-Set-Exc", span, self.expr_star(es, store, m));
                if vs.iter().any(Value::is_bottom) {
                    self.error("E-Set-Err", span, ErrorKind::UndefinedElement)
                } else {
                    self.conclude("E-Set-Sucs", span, Ok(Value::set(vs)))
                }
            }
            ExprKind::Map(pairs) => {
                let flat: Vec<Expr> = pairs
                    .iter()
                    .flat_map(|(k, v)| [k.clone(), v.clone()])
                    .collect();
                let vs = premise!(self, "E-Map-Exc", span, self.expr_star(&flat, store, m));
                if vs.iter().any(Value::is_bottom) {
                    self.error("E-Map-Err", span, ErrorKind::UndefinedElement)
                } else {
                    let mut it = vs.into_iter();
                    let mut kv = Vec::new();
                    while let (Some(k), Some(v)) = (it.next(), it.next()) {
                        kv.push((k, v));
                    }
                    self.conclude("E-Map-Sucs", span, Ok(Value::map(kv)))
                }
            }
            ExprKind::Lookup(a, b) => {
                let v1 = premise!(self, "E-Lookup-Exc1", span, self.expr(a, store, m));
                let Value::Map(map) = v1 else {
                    return self.error("E-Lookup-Err", span, ErrorKind::NotAMap);
                };
                let v2 = premise!(self, "E-Lookup-Exc2", span, self.expr(b, store, m));
                match map.get(&v2) {
                    Some(v) => {
                        let v = v.clone();
                        self.conclude("E-Lookup-Sucs", span, Ok(v))
                    }
                    None => {
                        let exc = ExRes::Throw(Value::cons("nokey", [v2]));
                        self.conclude("E-Lookup-NoKey", span, Err(exc.into()))
                    }
                }
            }
            ExprKind::Update(a, b, c) => {
                let v1 = premise!(self, "E-Update-Exc1", span, self.expr(a, store, m));
                let Value::Map(map) = v1 else {
                    return self.error("E-Update-Err1", span, ErrorKind::NotAMap);
                };
                let v2 = premise!(self, "E-Update-Exc2", span, self.expr(b, store, m));
                let v3 = premise!(self, "E-Update-Exc3", span, self.expr(c, store, m));
                if v2.is_bottom() || v3.is_bottom() {
                    self.error("E-Update-Err2", span, ErrorKind::UndefinedElement)
                } else {
                    self.conclude("E-Update-Sucs", span, Ok(map_update(&map, v2, v3)))
                }
            }
            ExprKind::Call(f, args) => {
                let vs = premise!(self, "E-Call-Arg-Exc", span, self.expr_star(args, store, m));
                let module = self.module;
                let Some(fun) = module.function(f) else {
                    return self.error("E-Call-Arg-Err", span, ErrorKind::Undefined(f.clone()));
                };
                self.call(fun, vs, store, m, span)
            }
            ExprKind::Return(a) => {
                let v = premise!(self, "E-Ret-Exc", span, self.expr(a, store, m));
                self.conclude("E-Ret-Sucs", span, Err(ExRes::Return(v).into()))
            }
            ExprKind::Assign(x, a) => {
                let v = premise!(self, "E-Asgn-Exc", span, self.expr(a, store, m));
                let Some(t) = x.site.declared_type() else {
                    return self.error("E-Asgn-Err", span, ErrorKind::NotAssignable(x.name.clone()));
                };
                if conforms(&v, t, self.module.data()) {
                    store.insert(x.name.clone(), v.clone());
                    self.conclude("E-Asgn-Sucs", span, Ok(v))
                } else {
                    self.error("E-Asgn-Err", span, ErrorKind::AssignType(x.name.clone()))
                }
            }
            ExprKind::If(c, a, b) => {
                let v = premise!(self, "E-If-Exc", span, self.expr(c, store, m));
                match v.as_bool() {
                    Some(true) => {
                        let r = self.expr(a, store, m);
                        self.conclude("E-If-True", span, r)
                    }
                    Some(false) => {
                        let r = self.expr(b, store, m);
                        self.conclude("E-If-False", span, r)
                    }
                    None => self.error("E-If-Err", span, ErrorKind::NotABoolean),
                }
            }
            ExprKind::Switch(scrutinee, cases) => {
                let v = premise!(self, "E-Switch-Exc1", span, self.expr(scrutinee, store, m));
                match self.cases(cases, &v, store, m, span) {
                    Ok(r) => self.conclude("E-Switch-Sucs", span, Ok(r)),
                    Err(Interrupt::Exc(ExRes::Fail)) => {
                        self.conclude("E-Switch-Fail", span, Ok(Value::Bottom))
                    }
                    r => self.conclude("E-Switch-Exc2", span, r),
                }
            }
            ExprKind::Visit(st, scrutinee, cases) => {
                let v = premise!(self, "E-Visit-Exc1", span, self.expr(scrutinee, store, m));
                match self.visit(*st, cases, &v, store, m, span) {
                    Ok(r) => self.conclude("E-Visit-Sucs", span, Ok(r)),
                    Err(Interrupt::Exc(ExRes::Fail)) => self.conclude("E-Visit-Fail", span, Ok(v)),
                    r => self.conclude("E-Visit-Exc2", span, r),
                }
            }
            ExprKind::Break => self.conclude("E-Break", span, Err(ExRes::Break.into())),
            ExprKind::Continue => self.conclude("E-Continue", span, Err(ExRes::Continue.into())),
            ExprKind::Fail => self.conclude("E-Fail", span, Err(ExRes::Fail.into())),
            ExprKind::Block(decls, es) => {
                let r = self.expr_star(es, store, m);
                store.remove_all(decls.iter().map(|d| &d.name));
                match r {
                    Ok(vs) => self.conclude("E-Block-Sucs", span, Ok(last(&vs))),
                    Err(x) => self.conclude("E-Block-Exc", span, Err(x)),
                }
            }
            ExprKind::For(g, body) => {
                let envs = premise!(self, "E-For-Exc", span, self.generator(g, store, m, span));
                let r = self.each(body, &envs, store, m, span);
                self.conclude("E-For-Sucs", span, r)
            }
            ExprKind::While(c, body) => self.while_loop(c, body, store, m + 1, span),
            ExprKind::Solve(xs, body) => self.solve(xs, body, store, m + 1, span),
            ExprKind::Throw(a) => {
                let v = premise!(self, "E-Thr-Exc", span, self.expr(a, store, m));
                self.conclude("E-Thr-Sucs", span, Err(ExRes::Throw(v).into()))
            }
            ExprKind::TryCatch(a, x, handler) => match self.expr(a, store, m) {
                Err(Interrupt::Exc(ExRes::Throw(v))) => {
                    store.insert(x.clone(), v);
                    let r = self.expr(handler, store, m);
                    store.remove(x);
                    self.conclude("E-Try-Catch", span, r)
                }
                r => self.conclude("E-Try-Ord", span, r),
            },
            ExprKind::TryFinally(a, b) => {
                let r1 = match self.expr(a, store, m) {
                    Err(Interrupt::Timeout) => return Err(Interrupt::Timeout),
                    Err(i @ (Interrupt::DepthExceeded | Interrupt::StepsExceeded)) => return Err(i),
                    r => r,
                };
                match self.expr(b, store, m) {
                    Ok(_) => self.conclude("E-Fin-Sucs", span, r1),
                    r2 => self.conclude("E-Fin-Exc", span, r2),
                }
            }
        }
    }

    /// `E-While` at fuel `fuel`. Each further iteration is a fresh judgment
    /// with one unit less, so this runs as a loop.
    fn while_loop(
        &mut self,
        c: &Expr,
        body: &Expr,
        store: &mut Store,
        mut fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        loop {
            if fuel == 0 {
                return Err(Interrupt::Timeout);
            }
            let m = fuel - 1;
            let v = premise!(self, "E-While-Exc1", span, self.expr(c, store, m));
            match v.as_bool() {
                Some(false) => return self.conclude("E-While-False", span, Ok(Value::Bottom)),
                None => return self.error("E-While-Err", span, ErrorKind::NotABoolean),
                Some(true) => {}
            }
            match self.expr(body, store, m) {
                Ok(_) | Err(Interrupt::Exc(ExRes::Continue)) => {
                    self.note("E-While-True-Sucs", span, "continue");
                    fuel = m;
                }
                Err(Interrupt::Exc(ExRes::Break)) => {
                    return self.conclude("E-While-True-Break", span, Ok(Value::Bottom))
                }
                r => return self.conclude("E-While-Exc2", span, r),
            }
        }
    }

    fn solve(
        &mut self,
        xs: &[crate::ast::VarRef],
        body: &Expr,
        store: &mut Store,
        mut fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        loop {
            if fuel == 0 {
                return Err(Interrupt::Timeout);
            }
            let m = fuel - 1;
            let before: Vec<Option<Value>> = xs.iter().map(|x| store.get(&x.name).cloned()).collect();
            let v = premise!(self, "E-Solve-Exc", span, self.expr(body, store, m));
            let mut changed = false;
            for (x, old) in xs.iter().zip(&before) {
                match (old, store.get(&x.name)) {
                    (Some(old), Some(new)) => changed |= old != new,
                    _ => {
                        return self.error("E-Solve-Err", span, ErrorKind::SolveUnbound(x.name.clone()))
                    }
                }
            }
            if !changed {
                return self.conclude("E-Solve-Eq", span, Ok(v));
            }
            self.note("E-Solve-Neq", span, "continue");
            fuel = m;
        }
    }

    /// Applies `fun` to already evaluated arguments. `m` is the fuel for the
    /// body, one less than the enclosing call judgment.
    pub(crate) fn call(
        &mut self,
        fun: &FunDef,
        args: Vec<Value>,
        store: &mut Store,
        m: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        let data = self.module.data();
        let args_ok = args.len() == fun.params.len()
            && args
                .iter()
                .zip(&fun.params)
                .all(|(v, p)| conforms(v, &p.ty, data));
        if !args_ok {
            return self.error("E-Call-Arg-Err", span, ErrorKind::ArgumentType(fun.name.clone()));
        }
        let module = self.module;
        let mut local: Store = module
            .global_names()
            .filter_map(|y| store.get(y).map(|v| (y.clone(), v.clone())))
            .collect();
        for (p, v) in fun.params.iter().zip(args) {
            local.insert(p.name.clone(), v);
        }
        let r = self.expr(&fun.body, &mut local, m);
        for y in module.global_names() {
            if let Some(v) = local.get(y) {
                store.insert(y.clone(), v.clone());
            }
        }
        let escaped = |what: &'static str| {
            ExRes::Error(RuntimeError::new(
                ErrorKind::EscapedControl(what, fun.name.clone()),
                span,
            ))
        };
        match r {
            Ok(v) | Err(Interrupt::Exc(ExRes::Return(v))) => {
                if conforms(&v, &fun.ret, data) {
                    self.conclude("E-Call-Sucs", span, Ok(v))
                } else {
                    self.error("E-Call-Res-Err1", span, ErrorKind::ReturnType(fun.name.clone()))
                }
            }
            Err(Interrupt::Exc(ExRes::Throw(v))) => {
                self.conclude("E-Call-Res-Exc", span, Err(ExRes::Throw(v).into()))
            }
            Err(Interrupt::Exc(x)) => {
                let err = match x {
                    ExRes::Break => escaped("break"),
                    ExRes::Continue => escaped("continue"),
                    ExRes::Fail => escaped("fail"),
                    other => other,
                };
                self.conclude("E-Call-Res-Err2", span, Err(err.into()))
            }
            Err(other) => Err(other),
        }
    }

    /// `e⃗; σ ==eval* n==> vres*; σ'`, evaluating left to right.
    pub fn expr_star(&mut self, es: &[Expr], store: &mut Store, fuel: Fuel) -> Outcome<Vec<Value>> {
        let mut f = fuel;
        let mut out = Vec::with_capacity(es.len());
        for e in es {
            if f == 0 {
                return Err(Interrupt::Timeout);
            }
            let m = f - 1;
            out.push(self.expr(e, store, m)?);
            f = m;
        }
        if f == 0 {
            return Err(Interrupt::Timeout);
        }
        Ok(out)
    }

    /// `cs; v; σ ==cases n==> vres; σ'`. A failing case is retried from the
    /// store the cases started in.
    pub fn cases(
        &mut self,
        cs: &[Case],
        v: &Value,
        store: &mut Store,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        let mut f = fuel;
        for c in cs {
            if f == 0 {
                return Err(Interrupt::Timeout);
            }
            let m = f - 1;
            let envs = match_pattern(&c.pattern, v, store, self.module.data());
            let saved = store.clone();
            match self.case(&envs, &c.body, store, m, span) {
                Err(Interrupt::Exc(ExRes::Fail)) => {
                    *store = saved;
                    self.note("ECS-More-Fail", span, "fail");
                    f = m;
                }
                r => return self.conclude("ECS-More-Ord", span, r),
            }
        }
        if f == 0 {
            return Err(Interrupt::Timeout);
        }
        self.conclude("ECS-Emp", span, Err(ExRes::Fail.into()))
    }

    /// `ρ̄; e; σ ==case n==> vres; σ'`: tries `e` under each environment
    /// until one does not fail.
    pub fn case(
        &mut self,
        envs: &[Env],
        body: &Expr,
        store: &mut Store,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        let mut f = fuel;
        for env in envs {
            if f == 0 {
                return Err(Interrupt::Timeout);
            }
            let m = f - 1;
            let saved = store.clone();
            store.extend(env);
            match self.expr(body, store, m) {
                Err(Interrupt::Exc(ExRes::Fail)) => {
                    *store = saved;
                    self.note("EC-More-Fail", span, "fail");
                    f = m;
                }
                r => {
                    store.remove_all(env.names());
                    return self.conclude("EC-More-Ord", span, r);
                }
            }
        }
        if f == 0 {
            return Err(Interrupt::Timeout);
        }
        self.conclude("EC-Emp", span, Err(ExRes::Fail.into()))
    }

    /// `e; ρ̄; σ ==each n==> vres; σ'`: the body of a `for` loop once per
    /// environment.
    pub fn each(
        &mut self,
        body: &Expr,
        envs: &[Env],
        store: &mut Store,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        let mut f = fuel;
        for env in envs {
            if f == 0 {
                return Err(Interrupt::Timeout);
            }
            let m = f - 1;
            store.extend(env);
            let r = self.expr(body, store, m);
            store.remove_all(env.names());
            match r {
                Ok(_) | Err(Interrupt::Exc(ExRes::Continue)) => {
                    self.note("EE-More-Sucs", span, "continue");
                    f = m;
                }
                Err(Interrupt::Exc(ExRes::Break)) => {
                    return self.conclude("EE-More-Break", span, Ok(Value::Bottom))
                }
                r => return self.conclude("EE-More-Exc", span, r),
            }
        }
        if f == 0 {
            return Err(Interrupt::Timeout);
        }
        self.conclude("EE-Emp", span, Ok(Value::Bottom))
    }

    /// `g; σ ==gexp n==> envres; σ'`
    pub fn generator(
        &mut self,
        g: &Generator,
        store: &mut Store,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Vec<Env>> {
        if fuel == 0 {
            return Err(Interrupt::Timeout);
        }
        let m = fuel - 1;
        match g {
            Generator::Matching(p, e) => {
                let v = premise!(self, "G-Pat-Exc", span, self.expr(e, store, m));
                let envs = match_pattern(p, &v, store, self.module.data());
                self.conclude("G-Pat-Sucs", span, Ok(envs))
            }
            Generator::Enumerating(x, e) => {
                let v = premise!(self, "G-Enum-Exc", span, self.expr(e, store, m));
                let items: Vec<Value> = match &v {
                    Value::List(items) => items.to_vec(),
                    Value::Set(items) => items.as_slice().to_vec(),
                    Value::Map(pairs) => pairs.keys().cloned().collect(),
                    _ => return self.error("G-Enum-Err", span, ErrorKind::NotACollection),
                };
                let envs = items
                    .into_iter()
                    .map(|v| Env::singleton(x.clone(), v))
                    .collect();
                let rule = match v {
                    Value::List(_) => "G-Enum-List",
                    Value::Set(_) => "G-Enum-Set",
                    _ => "G-Enum-Map",
                };
                self.conclude(rule, span, Ok(envs))
            }
        }
    }
}

/// Converts an interrupted judgment of an unbounded run into its public shape.
pub(crate) fn settle<T>(r: Outcome<T>, limits: Limits) -> Result<Result<T, ExRes>, ResourceExhausted> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(Interrupt::Exc(x)) => Ok(Err(x)),
        Err(Interrupt::DepthExceeded) => Err(ResourceExhausted::Depth {
            limit: limits.depth,
        }),
        Err(Interrupt::StepsExceeded) => Err(ResourceExhausted::Steps {
            limit: limits.steps.unwrap_or(u64::MAX),
        }),
        Err(Interrupt::Timeout) => unreachable!("unbounded evaluation ran out of fuel"),
    }
}

/// Evaluates `e` in `store` without a fuel bound.
pub fn eval_expr(module: &Module, e: &Expr, store: &Store) -> Result<(VRes, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.expr(e, &mut s, UNBOUNDED);
    Ok((settle(r, it.limits())?, s))
}

pub fn eval_expr_star(
    module: &Module,
    es: &[Expr],
    store: &Store,
) -> Result<(Result<Vec<Value>, ExRes>, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.expr_star(es, &mut s, UNBOUNDED);
    Ok((settle(r, it.limits())?, s))
}

pub fn eval_cases(
    module: &Module,
    cs: &[Case],
    v: &Value,
    store: &Store,
) -> Result<(VRes, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.cases(cs, v, &mut s, UNBOUNDED, Span::default());
    Ok((settle(r, it.limits())?, s))
}

pub fn eval_case(
    module: &Module,
    envs: &[Env],
    body: &Expr,
    store: &Store,
) -> Result<(VRes, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.case(envs, body, &mut s, UNBOUNDED, body.span);
    Ok((settle(r, it.limits())?, s))
}

pub fn eval_each(
    module: &Module,
    body: &Expr,
    envs: &[Env],
    store: &Store,
) -> Result<(VRes, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.each(body, envs, &mut s, UNBOUNDED, body.span);
    Ok((settle(r, it.limits())?, s))
}

pub fn eval_gen(
    module: &Module,
    g: &Generator,
    store: &Store,
) -> Result<(EnvRes, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.generator(g, &mut s, UNBOUNDED, Span::default());
    Ok((settle(r, it.limits())?, s))
}
