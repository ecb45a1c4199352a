//! Generic traversal: the `visit` strategies and value reconstruction.
//!
//! Traversals are always finite since they only descend into the children of
//! the value being visited. The fixpoint strategies (`innermost`,
//! `outermost`) repeat a full traversal until the value stops changing, and
//! those may diverge.

use crate::ast::{Case, Span, Strategy};
use crate::eval::{premise, settle, Fuel, Interpreter, Interrupt, Outcome, ResourceExhausted, UNBOUNDED};
use crate::typing::{conforms, DataEnv};
use crate::validate::Module;
use crate::value::{children, ErrorKind, ExRes, RcRes, Store, VFRes, VRes, Value, ValueMap};

/// Whether a traversal stops after the first successful case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BreakMode {
    Break,
    NoBreak,
}

/// `fail` falls back to the original value.
pub fn if_fail(r: VFRes, v: &Value) -> Value {
    r.unwrap_or_else(|| v.clone())
}

/// Combines the result of one element with the results of the rest.
pub fn vcombine(first: VFRes, rest: Option<Vec<Value>>, v: &Value, vs: &[Value]) -> Option<Vec<Value>> {
    match (first, rest) {
        (None, None) => None,
        (first, rest) => {
            let mut out = vec![if_fail(first, v)];
            match rest {
                Some(rest) => out.extend(rest),
                None => out.extend(vs.iter().cloned()),
            }
            Some(out)
        }
    }
}

/// Rebuilds `v` with its children replaced by `kids`.
pub fn reconstruct(v: &Value, kids: &[Value], data: &DataEnv) -> RcRes {
    match v {
        Value::Basic(_) | Value::Bottom => {
            if kids.is_empty() {
                Ok(v.clone())
            } else {
                Err(ErrorKind::Reconstruct)
            }
        }
        Value::Cons(k, _) => {
            let sig = data.constructor(k).ok_or(ErrorKind::Reconstruct)?;
            let ok = sig.arity() == kids.len()
                && kids
                    .iter()
                    .zip(sig.field_types())
                    .all(|(v, t)| !v.is_bottom() && conforms(v, t, data));
            if ok {
                Ok(Value::Cons(k.clone(), kids.into()))
            } else {
                Err(ErrorKind::Reconstruct)
            }
        }
        Value::List(_) | Value::Set(_) => {
            if kids.iter().any(Value::is_bottom) {
                Err(ErrorKind::Reconstruct)
            } else if matches!(v, Value::List(_)) {
                Ok(Value::list(kids.iter().cloned()))
            } else {
                Ok(Value::set(kids.iter().cloned()))
            }
        }
        Value::Map(_) => {
            if !kids.len().is_multiple_of(2) || kids.iter().any(Value::is_bottom) {
                return Err(ErrorKind::Reconstruct);
            }
            let (keys, vals) = kids.split_at(kids.len() / 2);
            Ok(Value::Map(ValueMap::new(
                keys.iter().cloned().zip(vals.iter().cloned()),
            )))
        }
    }
}

/// One traversal step over a single value, as used by the sequence rules.
type VisitOne<I> = fn(&mut I, &[Case], &Value, &mut Store, BreakMode, Fuel, Span) -> Outcome<Value>;

/// Outcome of a traversal over a sequence of values: `None` when no case
/// applied anywhere.
pub type StarResult = Result<Option<Vec<Value>>, ExRes>;

impl Interpreter<'_> {
    /// `cs; v; σ ==visit st n==> vres; σ'`
    pub fn visit(
        &mut self,
        st: Strategy,
        cs: &[Case],
        v: &Value,
        store: &mut Store,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        if fuel == 0 {
            return Err(Interrupt::Timeout);
        }
        let m = fuel - 1;
        let r = match st {
            Strategy::TopDown => self.td(cs, v, store, BreakMode::NoBreak, m, span),
            Strategy::TopDownBreak => self.td(cs, v, store, BreakMode::Break, m, span),
            Strategy::BottomUp => self.bu(cs, v, store, BreakMode::NoBreak, m, span),
            Strategy::BottomUpBreak => self.bu(cs, v, store, BreakMode::Break, m, span),
            Strategy::Innermost | Strategy::Outermost => {
                return self.fixpoint(st, cs, v, store, fuel, span)
            }
        };
        self.conclude("EV", span, r)
    }

    /// `innermost` and `outermost`: repeat a full traversal until nothing
    /// changes. Each repetition is a nested judgment with one unit less.
    fn fixpoint(
        &mut self,
        st: Strategy,
        cs: &[Case],
        v: &Value,
        store: &mut Store,
        mut fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        let (eq_rule, neq_rule, exc_rule) = if st == Strategy::Innermost {
            ("EV-IM-Eq", "EV-IM-Neq", "EV-IM-Exc")
        } else {
            ("EV-OM-Eq", "EV-OM-Neq", "EV-OM-Exc")
        };
        let mut cur = v.clone();
        loop {
            if fuel == 0 {
                return Err(Interrupt::Timeout);
            }
            let m = fuel - 1;
            let step = if st == Strategy::Innermost {
                self.bu(cs, &cur, store, BreakMode::NoBreak, m, span)
            } else {
                self.td(cs, &cur, store, BreakMode::NoBreak, m, span)
            };
            // A pass where no case applies leaves the value as it is, which
            // is the fixpoint.
            let step = match step {
                Err(Interrupt::Exc(ExRes::Fail)) => Ok(cur.clone()),
                r => r,
            };
            let next = premise!(self, exc_rule, span, step);
            if next == cur {
                return self.conclude(eq_rule, span, Ok(next));
            }
            self.note(neq_rule, span, "continue");
            cur = next;
            fuel = m;
        }
    }

    /// Top-down traversal of a single value.
    pub fn td(
        &mut self,
        cs: &[Case],
        v: &Value,
        store: &mut Store,
        br: BreakMode,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        if fuel == 0 {
            return Err(Interrupt::Timeout);
        }
        self.nested(|me| me.td_step(cs, v, store, br, fuel - 1, span))
    }

    fn td_step(
        &mut self,
        cs: &[Case],
        v: &Value,
        store: &mut Store,
        br: BreakMode,
        m: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        let here: VFRes = match self.cases(cs, v, store, m, span) {
            Ok(v2) if br == BreakMode::Break => return self.conclude("ETV-Break-Sucs", span, Ok(v2)),
            Ok(v2) => Some(v2),
            Err(Interrupt::Exc(ExRes::Fail)) => None,
            r => return self.conclude("ETV-Exc1", span, r),
        };
        let target = if_fail(here.clone(), v);
        let kids = children(&target);
        match self.td_star(cs, &kids, store, br, m, span) {
            Err(Interrupt::Exc(ExRes::Fail)) => {
                let r = here.ok_or(Interrupt::Exc(ExRes::Fail));
                self.conclude("ETV-Ord-Sucs1", span, r)
            }
            Ok(kids2) => match reconstruct(&target, &kids2, self.module.data()) {
                Ok(v3) => self.conclude("ETV-Ord-Sucs2", span, Ok(v3)),
                Err(k) => self.error("ETV-Ord-Err", span, k),
            },
            r => self.conclude("ETV-Exc2", span, r.map(|_| Value::Bottom)),
        }
    }

    /// Top-down traversal of a sequence. Fails only if every element fails.
    pub fn td_star(
        &mut self,
        cs: &[Case],
        vs: &[Value],
        store: &mut Store,
        br: BreakMode,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Vec<Value>> {
        self.star(cs, vs, store, br, fuel, span, Self::td, ("ETVS", "ETVS-Break", "ETVS-Exc"))
    }

    /// Bottom-up traversal of a single value.
    pub fn bu(
        &mut self,
        cs: &[Case],
        v: &Value,
        store: &mut Store,
        br: BreakMode,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        if fuel == 0 {
            return Err(Interrupt::Timeout);
        }
        self.nested(|me| me.bu_step(cs, v, store, br, fuel - 1, span))
    }

    fn bu_step(
        &mut self,
        cs: &[Case],
        v: &Value,
        store: &mut Store,
        br: BreakMode,
        m: Fuel,
        span: Span,
    ) -> Outcome<Value> {
        let kids = children(v);
        match self.bu_star(cs, &kids, store, br, m, span) {
            Ok(kids2) => {
                let rebuilt = match reconstruct(v, &kids2, self.module.data()) {
                    Ok(v2) => v2,
                    Err(k) => return self.error("EBU-Err", span, k),
                };
                if br == BreakMode::Break {
                    return self.conclude("EBU-Break-Sucs", span, Ok(rebuilt));
                }
                match self.cases(cs, &rebuilt, store, m, span) {
                    Ok(v3) => self.conclude("EBU-No-Break-Sucs", span, Ok(v3)),
                    Err(Interrupt::Exc(ExRes::Fail)) => {
                        self.conclude("EBU-No-Break-Sucs", span, Ok(rebuilt))
                    }
                    r => self.conclude("EBU-No-Break-Exc", span, r),
                }
            }
            Err(Interrupt::Exc(ExRes::Fail)) => {
                let r = self.cases(cs, v, store, m, span);
                self.conclude("EBU-Fail-Sucs", span, r)
            }
            r => self.conclude("EBU-Exc", span, r.map(|_| Value::Bottom)),
        }
    }

    pub fn bu_star(
        &mut self,
        cs: &[Case],
        vs: &[Value],
        store: &mut Store,
        br: BreakMode,
        fuel: Fuel,
        span: Span,
    ) -> Outcome<Vec<Value>> {
        self.star(cs, vs, store, br, fuel, span, Self::bu, ("EBUS", "EBUS-Break", "EBUS-Exc"))
    }

    /// Shared sequence judgment. The judgment for the suffix starting at
    /// element `i` runs with `i` units less than the whole, so the nesting is
    /// flattened into a loop; under break mode the first success returns the
    /// remaining elements untouched.
    #[allow(clippy::too_many_arguments)]
    fn star(
        &mut self,
        cs: &[Case],
        vs: &[Value],
        store: &mut Store,
        br: BreakMode,
        fuel: Fuel,
        span: Span,
        one: VisitOne<Self>,
        rules: (&'static str, &'static str, &'static str),
    ) -> Outcome<Vec<Value>> {
        let mut f = fuel;
        let mut results: Vec<VFRes> = Vec::with_capacity(vs.len());
        for (i, v) in vs.iter().enumerate() {
            if f == 0 {
                return Err(Interrupt::Timeout);
            }
            let m = f - 1;
            match one(self, cs, v, store, br, m, span) {
                Ok(v2) if br == BreakMode::Break => {
                    let mut out: Vec<Value> = vs[..i].to_vec();
                    out.push(v2);
                    out.extend(vs[i + 1..].iter().cloned());
                    return self.conclude(rules.1, span, Ok(out));
                }
                Ok(v2) => results.push(Some(v2)),
                Err(Interrupt::Exc(ExRes::Fail)) => results.push(None),
                Err(Interrupt::Exc(x)) => {
                    self.note(rules.2, span, x.kind_name());
                    return Err(Interrupt::Exc(x));
                }
                Err(other) => return Err(other),
            }
            f = m;
        }
        if f == 0 {
            return Err(Interrupt::Timeout);
        }
        // Fold from the right exactly as the nested judgments would.
        let mut acc: Option<Vec<Value>> = None;
        for (i, r) in results.into_iter().enumerate().rev() {
            acc = vcombine(r, acc, &vs[i], &vs[i + 1..]);
        }
        match acc {
            Some(out) => self.conclude(rules.0, span, Ok(out)),
            None => self.conclude(rules.0, span, Err(ExRes::Fail.into())),
        }
    }
}

/// Runs `visit` with the given strategy without a fuel bound.
pub fn eval_visit(
    module: &Module,
    st: Strategy,
    cs: &[Case],
    v: &Value,
    store: &Store,
) -> Result<(VRes, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.visit(st, cs, v, &mut s, UNBOUNDED, Span::default());
    Ok((settle(r, it.limits())?, s))
}

/// Single top-down step with a visitor result (`None` for `fail`).
pub fn td_visit(
    module: &Module,
    cs: &[Case],
    v: &Value,
    store: &Store,
    br: BreakMode,
) -> Result<(Result<VFRes, ExRes>, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.td(cs, v, &mut s, br, UNBOUNDED, Span::default());
    Ok((settle(lift_fail(r), it.limits())?, s))
}

pub fn bu_visit(
    module: &Module,
    cs: &[Case],
    v: &Value,
    store: &Store,
    br: BreakMode,
) -> Result<(Result<VFRes, ExRes>, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.bu(cs, v, &mut s, br, UNBOUNDED, Span::default());
    Ok((settle(lift_fail(r), it.limits())?, s))
}

pub fn td_visit_star(
    module: &Module,
    cs: &[Case],
    vs: &[Value],
    store: &Store,
    br: BreakMode,
) -> Result<(StarResult, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.td_star(cs, vs, &mut s, br, UNBOUNDED, Span::default());
    Ok((settle(lift_fail(r), it.limits())?, s))
}

pub fn bu_visit_star(
    module: &Module,
    cs: &[Case],
    vs: &[Value],
    store: &Store,
    br: BreakMode,
) -> Result<(StarResult, Store), ResourceExhausted> {
    let mut it = Interpreter::new(module);
    let mut s = store.clone();
    let r = it.bu_star(cs, vs, &mut s, br, UNBOUNDED, Span::default());
    Ok((settle(lift_fail(r), it.limits())?, s))
}

fn lift_fail<T>(r: Outcome<T>) -> Outcome<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Interrupt::Exc(ExRes::Fail)) => Ok(None),
        Err(e) => Err(e),
    }
}
