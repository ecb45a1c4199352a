//! A brute-force reference matcher.
//!
//! This shares no code with [`crate::pattern`]. Rather than peeling one
//! pattern at a time, it enumerates whole decompositions up front: every
//! way of cutting a list into consecutive pieces, and every assignment of
//! set elements to pattern positions. Results are sets, so enumeration order
//! and duplicates do not matter.

use std::collections::BTreeSet;

use crate::ast::{Pattern, StarPattern};
use crate::typing::{subtype, type_of, DataEnv};
use crate::value::{children, Env, Store, Value};

/// The enumeration would exceed the oracle's work budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("oracle enumeration exceeded its budget of {0} steps")]
pub struct BudgetExceeded(pub usize);

pub const DEFAULT_ORACLE_BUDGET: usize = 500_000;

pub type EnvSet = BTreeSet<Env>;

/// All environments under which `p` matches `v`.
pub fn oracle_match(p: &Pattern, v: &Value, store: &Store, data: &DataEnv) -> Result<EnvSet, BudgetExceeded> {
    oracle_match_with_budget(p, v, store, data, DEFAULT_ORACLE_BUDGET)
}

pub fn oracle_match_with_budget(
    p: &Pattern,
    v: &Value,
    store: &Store,
    data: &DataEnv,
    budget: usize,
) -> Result<EnvSet, BudgetExceeded> {
    let mut o = Oracle {
        store,
        data,
        left: budget,
        budget,
    };
    o.pat(p, v)
}

struct Oracle<'a> {
    store: &'a Store,
    data: &'a DataEnv,
    left: usize,
    budget: usize,
}

fn unit() -> EnvSet {
    BTreeSet::from([Env::new()])
}

fn single(x: &str, v: &Value) -> EnvSet {
    BTreeSet::from([Env::singleton(x.into(), v.clone())])
}

/// Pairwise unions of environments that agree where both are defined.
fn product(a: &EnvSet, b: &EnvSet) -> EnvSet {
    let mut out = BTreeSet::new();
    for x in a {
        'pairs: for y in b {
            let mut z = x.clone();
            for (name, val) in y.iter() {
                match x.get(name) {
                    Some(w) if w != val => continue 'pairs,
                    Some(_) => {}
                    None => z.insert(name.clone(), val.clone()),
                }
            }
            out.insert(z);
        }
    }
    out
}

impl Oracle<'_> {
    fn tick(&mut self) -> Result<(), BudgetExceeded> {
        if self.left == 0 {
            return Err(BudgetExceeded(self.budget));
        }
        self.left -= 1;
        Ok(())
    }

    fn var(&self, x: &str, v: &Value) -> EnvSet {
        match self.store.get(x) {
            Some(w) if w == v => unit(),
            Some(_) => EnvSet::new(),
            None => single(x, v),
        }
    }

    fn pat(&mut self, p: &Pattern, v: &Value) -> Result<EnvSet, BudgetExceeded> {
        self.tick()?;
        Ok(match p {
            Pattern::Basic(b) => match v {
                Value::Basic(c) if b == c => unit(),
                _ => EnvSet::new(),
            },
            Pattern::Var(x) => self.var(&x.name, v),
            Pattern::Deconstructor(k, ps) => match v {
                Value::Cons(k2, vs) if k == k2 && ps.len() == vs.len() => {
                    let mut acc = unit();
                    for (p, v) in ps.iter().zip(vs.iter()) {
                        let here = self.pat(p, v)?;
                        acc = product(&acc, &here);
                    }
                    acc
                }
                _ => EnvSet::new(),
            },
            Pattern::TypedLabelled(t, x, inner) => {
                let fits = type_of(v, self.data).map(|a| subtype(&a, t)).unwrap_or(false);
                if fits {
                    let inner = self.pat(inner, v)?;
                    product(&single(x, v), &inner)
                } else {
                    EnvSet::new()
                }
            }
            Pattern::List(sps) => match v {
                Value::List(items) => self.list(sps, items)?,
                _ => EnvSet::new(),
            },
            Pattern::Set(sps) => match v {
                Value::Set(items) => self.set(sps, items.as_slice())?,
                _ => EnvSet::new(),
            },
            Pattern::Negation(inner) => {
                if self.pat(inner, v)?.is_empty() {
                    unit()
                } else {
                    EnvSet::new()
                }
            }
            Pattern::Descendant(inner) => {
                let mut out = EnvSet::new();
                let mut todo = vec![v.clone()];
                while let Some(sub) = todo.pop() {
                    out.extend(self.pat(inner, &sub)?);
                    todo.extend(children(&sub));
                }
                out
            }
        })
    }

    /// Envs for one component given the values it received.
    fn component(&mut self, sp: &StarPattern, part: &[Value], as_set: bool) -> Result<EnvSet, BudgetExceeded> {
        match sp {
            StarPattern::Ordinary(p) => match part {
                [one] => self.pat(p, one),
                _ => Ok(EnvSet::new()),
            },
            StarPattern::Star(x) => {
                let coll = if as_set {
                    Value::set(part.iter().cloned())
                } else {
                    Value::list(part.iter().cloned())
                };
                Ok(self.var(&x.name, &coll))
            }
        }
    }

    fn combine(&mut self, sps: &[StarPattern], parts: &[Vec<Value>], as_set: bool) -> Result<EnvSet, BudgetExceeded> {
        let mut acc = unit();
        for (sp, part) in sps.iter().zip(parts) {
            let here = self.component(sp, part, as_set)?;
            acc = product(&acc, &here);
            if acc.is_empty() {
                break;
            }
        }
        Ok(acc)
    }

    fn list(&mut self, sps: &[StarPattern], vs: &[Value]) -> Result<EnvSet, BudgetExceeded> {
        let mut out = EnvSet::new();
        self.cuts(sps, vs, 0, &mut Vec::new(), &mut out)?;
        Ok(out)
    }

    /// Every way of cutting `vs[start..]` into one consecutive piece per
    /// remaining pattern position.
    fn cuts(
        &mut self,
        sps: &[StarPattern],
        vs: &[Value],
        start: usize,
        parts: &mut Vec<Vec<Value>>,
        out: &mut EnvSet,
    ) -> Result<(), BudgetExceeded> {
        self.tick()?;
        if parts.len() == sps.len() {
            if start == vs.len() {
                out.extend(self.combine(sps, parts, false)?);
            }
            return Ok(());
        }
        for end in start..=vs.len() {
            parts.push(vs[start..end].to_vec());
            self.cuts(sps, vs, end, parts, out)?;
            parts.pop();
        }
        Ok(())
    }

    fn set(&mut self, sps: &[StarPattern], vs: &[Value]) -> Result<EnvSet, BudgetExceeded> {
        let n = sps.len();
        if n == 0 {
            return Ok(if vs.is_empty() { unit() } else { EnvSet::new() });
        }
        // Every function from elements to pattern positions.
        let mut owner = vec![0usize; vs.len()];
        let mut out = EnvSet::new();
        loop {
            self.tick()?;
            let mut parts = vec![Vec::new(); n];
            for (v, &o) in vs.iter().zip(&owner) {
                parts[o].push(v.clone());
            }
            let shape_ok = sps
                .iter()
                .zip(&parts)
                .all(|(sp, part)| matches!(sp, StarPattern::Star(_)) || part.len() == 1);
            if shape_ok {
                out.extend(self.combine(sps, &parts, true)?);
            }
            let mut i = 0;
            loop {
                if i == owner.len() {
                    return Ok(out);
                }
                owner[i] += 1;
                if owner[i] < n {
                    break;
                }
                owner[i] = 0;
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_pattern;

    fn run(p: &str, v: Value) -> EnvSet {
        oracle_match(&parse_pattern(p).unwrap(), &v, &Store::new(), &DataEnv::builtin()).unwrap()
    }

    #[test]
    fn set_stars_enumerate_all_subsets() {
        assert_eq!(run("{*xs, *ys}", Value::set([Value::int(1), Value::int(2)])).len(), 4);
    }

    #[test]
    fn list_stars_enumerate_all_splits() {
        assert_eq!(run("[*xs, *ys]", Value::list([Value::int(1), Value::int(2)])).len(), 3);
        assert_eq!(run("[]", Value::list([])).len(), 1);
        assert!(run("[]", Value::list([Value::int(1)])).is_empty());
        assert_eq!(run("[x, *ys]", Value::list([Value::int(1)])).len(), 1);
    }

    #[test]
    fn inconsistent_bindings_are_dropped() {
        let k12 = Value::cons("k", [Value::int(1), Value::int(2)]);
        assert!(run("k(x, x)", k12).is_empty());
        let k11 = Value::cons("k", [Value::int(1), Value::int(1)]);
        assert_eq!(run("k(x, x)", k11).len(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let big = Value::set((0..12).map(Value::int));
        let p = parse_pattern("{*a, *b, *c}").unwrap();
        let r = oracle_match_with_budget(&p, &big, &Store::new(), &DataEnv::builtin(), 1000);
        assert_eq!(r, Err(BudgetExceeded(1000)));
    }
}
