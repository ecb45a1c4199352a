//! Pattern matching: single patterns, star-pattern sequences inside lists
//! and sets, and environment merging.
//!
//! Matching is nondeterministic; every function here returns all candidate
//! environments in a fixed order. List splits are tried by increasing prefix
//! length. Set elements are picked in canonical order and subsets are tried
//! by size, then lexicographically. Duplicate environments are kept.

use std::collections::BTreeSet;

use crate::ast::{Pattern, StarPattern};
use crate::typing::{subtype, type_of, DataEnv};
use crate::value::{children, Env, Store, Value};

/// Which collection a star-pattern sequence is matched against. This fixes
/// both how subsequences are rebuilt into values and how the value sequence
/// may be partitioned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Collection {
    List,
    Set,
}

impl Collection {
    /// Rebuilds a collection value from a subsequence.
    pub fn construct(self, vs: &[Value]) -> Value {
        match self {
            Collection::List => Value::list(vs.iter().cloned()),
            Collection::Set => Value::set(vs.iter().cloned()),
        }
    }

    /// Splits into one element and the remaining values.
    pub fn partition_one(self, vs: &[Value]) -> Vec<(Value, Vec<Value>)> {
        match self {
            Collection::List => match vs.split_first() {
                Some((h, t)) => vec![(h.clone(), t.to_vec())],
                None => Vec::new(),
            },
            Collection::Set => (0..vs.len())
                .map(|i| {
                    let mut rest = vs.to_vec();
                    let picked = rest.remove(i);
                    (picked, rest)
                })
                .collect(),
        }
    }

    /// Splits into a subsequence and the remaining values.
    pub fn partition_sub(self, vs: &[Value]) -> Vec<(Vec<Value>, Vec<Value>)> {
        match self {
            Collection::List => (0..=vs.len())
                .map(|i| (vs[..i].to_vec(), vs[i..].to_vec()))
                .collect(),
            Collection::Set => subsets_by_size(vs.len())
                .into_iter()
                .map(|idx| {
                    let mut inside = Vec::with_capacity(idx.len());
                    let mut outside = Vec::with_capacity(vs.len() - idx.len());
                    let mut it = idx.iter().peekable();
                    for (i, v) in vs.iter().enumerate() {
                        if it.peek() == Some(&&i) {
                            it.next();
                            inside.push(v.clone());
                        } else {
                            outside.push(v.clone());
                        }
                    }
                    (inside, outside)
                })
                .collect(),
        }
    }

    /// The unique split whose first part is exactly `sub`, if any.
    fn split_off(self, sub: &[Value], vs: &[Value]) -> Option<Vec<Value>> {
        match self {
            Collection::List => vs.starts_with(sub).then(|| vs[sub.len()..].to_vec()),
            Collection::Set => {
                if sub.iter().all(|s| vs.contains(s)) {
                    Some(vs.iter().filter(|v| !sub.contains(v)).cloned().collect())
                } else {
                    None
                }
            }
        }
    }

    /// The elements of `v` when it is a collection of this kind.
    fn elements(self, v: &Value) -> Option<&[Value]> {
        match (self, v) {
            (Collection::List, Value::List(items)) => Some(items),
            (Collection::Set, Value::Set(items)) => Some(items.as_slice()),
            _ => None,
        }
    }
}

/// Index subsets of `0..n`, ordered by size and then lexicographically.
fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    fn combos(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            combos(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 0..=n {
        combos(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Value sequences already tried for the head of a pattern sequence.
pub type VisitedSet = BTreeSet<Vec<Value>>;

/// Matches `p` against `v`. The store is only read.
pub fn match_pattern(p: &Pattern, v: &Value, store: &Store, data: &DataEnv) -> Vec<Env> {
    match p {
        Pattern::Basic(b) => match v {
            Value::Basic(vb) if vb == b => vec![Env::new()],
            _ => Vec::new(),
        },
        Pattern::Var(x) => match store.get(&x.name) {
            Some(bound) if bound == v => vec![Env::new()],
            Some(_) => Vec::new(),
            None => vec![Env::singleton(x.name.clone(), v.clone())],
        },
        Pattern::Deconstructor(k, ps) => match v {
            Value::Cons(k2, vs) if k2 == k && vs.len() == ps.len() => {
                let mut parts = Vec::with_capacity(ps.len());
                for (p, v) in ps.iter().zip(vs.iter()) {
                    let envs = match_pattern(p, v, store, data);
                    if envs.is_empty() {
                        return Vec::new();
                    }
                    parts.push(envs);
                }
                merge(&parts)
            }
            _ => Vec::new(),
        },
        Pattern::TypedLabelled(t, x, inner) => match type_of(v, data) {
            Ok(actual) if subtype(&actual, t) => {
                let inner_envs = match_pattern(inner, v, store, data);
                merge(&[vec![Env::singleton(x.clone(), v.clone())], inner_envs])
            }
            _ => Vec::new(),
        },
        Pattern::List(ps) => match v {
            Value::List(items) => {
                match_all(ps, items, store, &VisitedSet::new(), Collection::List, data)
            }
            _ => Vec::new(),
        },
        Pattern::Set(ps) => match v {
            Value::Set(items) => match_all(
                ps,
                items.as_slice(),
                store,
                &VisitedSet::new(),
                Collection::Set,
                data,
            ),
            _ => Vec::new(),
        },
        Pattern::Negation(inner) => {
            if match_pattern(inner, v, store, data).is_empty() {
                vec![Env::new()]
            } else {
                Vec::new()
            }
        }
        Pattern::Descendant(inner) => {
            let mut out = match_pattern(inner, v, store, data);
            for c in children(v) {
                out.extend(match_pattern(p, &c, store, data));
            }
            out
        }
    }
}

/// Matches a sequence of (star) patterns against a sequence of values,
/// skipping partitions whose chosen part is already in `visited`.
pub fn match_all(
    ps: &[StarPattern],
    vs: &[Value],
    store: &Store,
    visited: &VisitedSet,
    cfg: Collection,
    data: &DataEnv,
) -> Vec<Env> {
    let Some((head, rest)) = ps.split_first() else {
        return if vs.is_empty() { vec![Env::new()] } else { Vec::new() };
    };
    let mut visited = visited.clone();
    let mut out = Vec::new();
    match head {
        StarPattern::Ordinary(p) => {
            for (picked, others) in cfg.partition_one(vs) {
                let key = vec![picked];
                if visited.contains(&key) {
                    continue;
                }
                let here = match_pattern(p, &key[0], store, data);
                if !here.is_empty() {
                    let there = match_all(rest, &others, store, &VisitedSet::new(), cfg, data);
                    out.extend(merge(&[here, there]));
                }
                visited.insert(key);
            }
        }
        StarPattern::Star(x) => match store.get(&x.name) {
            Some(bound) => {
                let Some(sub) = cfg.elements(bound) else {
                    return Vec::new();
                };
                let Some(others) = cfg.split_off(sub, vs) else {
                    return Vec::new();
                };
                out = match_all(rest, &others, store, &VisitedSet::new(), cfg, data);
            }
            None => {
                for (sub, others) in cfg.partition_sub(vs) {
                    if visited.contains(&sub) {
                        continue;
                    }
                    let there = match_all(rest, &others, store, &VisitedSet::new(), cfg, data);
                    if !there.is_empty() {
                        let bind = vec![Env::singleton(x.name.clone(), cfg.construct(&sub))];
                        out.extend(merge(&[bind, there]));
                    }
                    visited.insert(sub);
                }
            }
        },
    }
    out
}

/// Combines candidate environments from independent sub-matches, keeping
/// only consistent combinations. The empty argument list yields a single
/// empty environment.
pub fn merge(seqs: &[Vec<Env>]) -> Vec<Env> {
    let Some((first, rest)) = seqs.split_first() else {
        return vec![Env::new()];
    };
    let tail = merge(rest);
    let mut out = Vec::new();
    for a in first {
        for b in &tail {
            if let Some(ab) = merge_pair(a, b) {
                out.push(ab);
            }
        }
    }
    out
}

/// The union of two environments that agree on their shared variables.
pub fn merge_pair(a: &Env, b: &Env) -> Option<Env> {
    let mut out = a.clone();
    for (x, v) in b.iter() {
        match a.get(x) {
            Some(w) if w != v => return None,
            Some(_) => {}
            None => out.insert(x.clone(), v.clone()),
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::VarRef;
    use crate::typing::Type;
    use std::sync::Arc;

    fn var(x: &str) -> Pattern {
        Pattern::Var(VarRef::new(x))
    }

    fn star(x: &str) -> StarPattern {
        StarPattern::Star(VarRef::new(x))
    }

    fn env(pairs: &[(&str, Value)]) -> Env {
        pairs.iter().map(|(k, v)| (Arc::from(*k), v.clone())).collect()
    }

    fn data() -> DataEnv {
        let mut d = DataEnv::builtin();
        d.declare("Expr", "intlit", vec![(Type::Int, Arc::from("v"))]);
        d.declare(
            "Expr",
            "plus",
            vec![(Type::adt("Expr"), Arc::from("l")), (Type::adt("Expr"), Arc::from("r"))],
        );
        d.declare("K", "k", vec![(Type::Int, Arc::from("a")), (Type::Int, Arc::from("b"))]);
        d
    }

    fn lit(i: i64) -> Value {
        Value::cons("intlit", [Value::int(i)])
    }

    #[test]
    fn variable_patterns() {
        let d = data();
        let mut s = Store::new();
        assert_eq!(match_pattern(&var("x"), &Value::int(5), &s, &d), vec![env(&[("x", Value::int(5))])]);
        s.insert(Arc::from("x"), Value::int(5));
        assert_eq!(match_pattern(&var("x"), &Value::int(5), &s, &d), vec![Env::new()]);
        assert!(match_pattern(&var("x"), &Value::int(6), &s, &d).is_empty());
    }

    #[test]
    fn descendant_counts_occurrences() {
        let d = data();
        let p = Pattern::Descendant(Box::new(Pattern::Deconstructor(
            Arc::from("intlit"),
            vec![Pattern::Basic(crate::value::Basic::int(0))],
        )));
        let v = Value::cons("plus", [lit(0), lit(5)]);
        assert_eq!(match_pattern(&p, &v, &Store::new(), &d).len(), 1);
        let v2 = Value::cons("plus", [lit(0), Value::cons("plus", [lit(0), lit(0)])]);
        assert_eq!(match_pattern(&p, &v2, &Store::new(), &d).len(), 3);
    }

    #[test]
    fn negation_patterns() {
        let d = data();
        let p = Pattern::Negation(Box::new(Pattern::Basic(crate::value::Basic::int(0))));
        assert_eq!(match_pattern(&p, &Value::int(1), &Store::new(), &d), vec![Env::new()]);
        assert!(match_pattern(&p, &Value::int(0), &Store::new(), &d).is_empty());
    }

    #[test]
    fn list_star_splits_in_prefix_order() {
        let d = data();
        let vs = [Value::int(1), Value::int(2)];
        let got = match_all(&[star("xs"), star("ys")], &vs, &Store::new(), &VisitedSet::new(), Collection::List, &d);
        let l = |xs: &[i64]| Value::list(xs.iter().map(|&i| Value::int(i)));
        assert_eq!(
            got,
            vec![
                env(&[("xs", l(&[])), ("ys", l(&[1, 2]))]),
                env(&[("xs", l(&[1])), ("ys", l(&[2]))]),
                env(&[("xs", l(&[1, 2])), ("ys", l(&[]))]),
            ]
        );
    }

    #[test]
    fn set_star_splits_cover_all_subsets() {
        let d = data();
        let vs = [Value::int(1), Value::int(2)];
        let got = match_all(&[star("xs"), star("ys")], &vs, &Store::new(), &VisitedSet::new(), Collection::Set, &d);
        let s = |xs: &[i64]| Value::set(xs.iter().map(|&i| Value::int(i)));
        assert_eq!(
            got,
            vec![
                env(&[("xs", s(&[])), ("ys", s(&[1, 2]))]),
                env(&[("xs", s(&[1])), ("ys", s(&[2]))]),
                env(&[("xs", s(&[2])), ("ys", s(&[1]))]),
                env(&[("xs", s(&[1, 2])), ("ys", s(&[]))]),
            ]
        );
    }

    #[test]
    fn empty_sequences() {
        let d = data();
        let s = Store::new();
        let v = VisitedSet::new();
        assert_eq!(match_all(&[], &[], &s, &v, Collection::List, &d), vec![Env::new()]);
        assert!(match_all(&[], &[Value::int(1)], &s, &v, Collection::List, &d).is_empty());
    }

    #[test]
    fn bound_star_variable_unifies() {
        let d = data();
        let mut s = Store::new();
        s.insert(Arc::from("xs"), Value::set([Value::int(1)]));
        let got = match_all(
            &[star("xs"), StarPattern::Ordinary(var("y"))],
            &[Value::int(1), Value::int(2)],
            &s,
            &VisitedSet::new(),
            Collection::Set,
            &d,
        );
        assert_eq!(got, vec![env(&[("y", Value::int(2))])]);
        s.insert(Arc::from("xs"), Value::int(1));
        assert!(match_all(&[star("xs")], &[Value::int(1)], &s, &VisitedSet::new(), Collection::Set, &d).is_empty());
    }

    #[test]
    fn merge_examples() {
        let a = vec![env(&[("x", Value::int(1))])];
        let b = vec![env(&[("x", Value::int(1)), ("y", Value::int(2))])];
        assert_eq!(merge(&[a.clone(), b.clone()]), b);
        let c = vec![env(&[("x", Value::int(2))])];
        assert!(merge(&[a, c]).is_empty());
        assert_eq!(merge(&[]), vec![Env::new()]);
    }

    #[test]
    fn nonlinear_patterns_agree_via_merge() {
        let d = data();
        let p = Pattern::Deconstructor(Arc::from("k"), vec![var("x"), var("x")]);
        let s = Store::new();
        assert!(match_pattern(&p, &Value::cons("k", [Value::int(1), Value::int(2)]), &s, &d).is_empty());
        assert_eq!(
            match_pattern(&p, &Value::cons("k", [Value::int(1), Value::int(1)]), &s, &d),
            vec![env(&[("x", Value::int(1))])]
        );
    }

    #[test]
    fn typed_labelled_checks_type() {
        let d = data();
        let p = Pattern::TypedLabelled(Type::Int, Arc::from("n"), Box::new(var("m")));
        assert_eq!(
            match_pattern(&p, &Value::int(3), &Store::new(), &d),
            vec![env(&[("m", Value::int(3)), ("n", Value::int(3))])]
        );
        assert!(match_pattern(&p, &Value::str("a"), &Store::new(), &d).is_empty());
    }

    #[test]
    fn subset_order() {
        assert_eq!(
            subsets_by_size(3),
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
        assert_eq!(subsets_by_size(0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets_by_size(5).len(), 32);
    }
}
