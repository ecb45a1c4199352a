//! Runtime values, stores, environments and the result shapes threaded
//! through every evaluation judgment.
//!
//! Sets and maps are kept in canonical form (sorted by [`Value`]'s total
//! order, no duplicate elements or keys) from the moment they are built, so
//! derived structural equality coincides with semantic equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::ast::{Name, Span};

/// Basic values: arbitrary precision integers and strings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basic {
    Int(BigInt),
    Str(Arc<str>),
}

impl Basic {
    pub fn int(i: impl Into<BigInt>) -> Self {
        Basic::Int(i.into())
    }

    pub fn str(s: &str) -> Self {
        Basic::Str(Arc::from(s))
    }
}

/// A runtime value.
///
/// The variant order is significant: the derived [`Ord`] compares the kind
/// first (basic < constructor < list < set < map < undefined) and then the
/// contents lexicographically. That order is what canonical sets and maps
/// are sorted by.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Basic(Basic),
    Cons(Name, Arc<[Value]>),
    List(Arc<[Value]>),
    Set(ValueSet),
    Map(ValueMap),
    /// The undefined value `■`.
    Bottom,
}

/// Canonical set contents: sorted, duplicate free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueSet(Arc<[Value]>);

/// Canonical map contents: sorted by key, keys distinct.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueMap(Arc<[(Value, Value)]>);

impl ValueSet {
    pub fn new(values: impl IntoIterator<Item = Value>) -> Self {
        let mut items: Vec<Value> = values.into_iter().collect();
        items.sort();
        items.dedup();
        ValueSet(items.into())
    }

    pub fn empty() -> Self {
        ValueSet(Arc::from(Vec::new()))
    }

    pub fn as_slice(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.0.binary_search(v).is_ok()
    }
}

impl ValueMap {
    /// Builds a canonical map. When a key occurs more than once the last
    /// binding wins, as if the pairs were inserted one after another.
    pub fn new(pairs: impl IntoIterator<Item = (Value, Value)>) -> Self {
        let map: BTreeMap<Value, Value> = pairs.into_iter().collect();
        ValueMap(map.into_iter().collect::<Vec<_>>().into())
    }

    pub fn empty() -> Self {
        ValueMap(Arc::from(Vec::new()))
    }

    pub fn as_slice(&self) -> &[(Value, Value)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, key: &Value) -> Option<&Value> {
        self.0
            .binary_search_by(|(k, _)| k.cmp(key))
            .ok()
            .map(|i| &self.0[i].1)
    }

    pub fn keys(&self) -> impl Iterator<Item = &Value> {
        self.0.iter().map(|(k, _)| k)
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.0.iter().map(|(_, v)| v)
    }
}

impl Value {
    pub fn int(i: impl Into<BigInt>) -> Self {
        Value::Basic(Basic::Int(i.into()))
    }

    pub fn str(s: &str) -> Self {
        Value::Basic(Basic::str(s))
    }

    pub fn cons(name: &str, args: impl IntoIterator<Item = Value>) -> Self {
        Value::Cons(Arc::from(name), args.into_iter().collect::<Vec<_>>().into())
    }

    pub fn list(items: impl IntoIterator<Item = Value>) -> Self {
        Value::List(items.into_iter().collect::<Vec<_>>().into())
    }

    pub fn set(items: impl IntoIterator<Item = Value>) -> Self {
        Value::Set(ValueSet::new(items))
    }

    pub fn map(pairs: impl IntoIterator<Item = (Value, Value)>) -> Self {
        Value::Map(ValueMap::new(pairs))
    }

    pub fn bool(b: bool) -> Self {
        Value::cons(if b { "true" } else { "false" }, [])
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Value::Bottom)
    }

    /// `Some(b)` if this is one of the built-in `true()` / `false()` values.
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Cons(k, args) if args.is_empty() => match &**k {
                "true" => Some(true),
                "false" => Some(false),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Basic(Basic::Int(i)) => Some(i),
            _ => None,
        }
    }

    /// Number of nodes, used by generators and tests to bound sizes.
    pub fn size(&self) -> usize {
        1 + children(self).iter().map(Value::size).sum::<usize>()
    }
}

/// Total order on values; the same order canonical collections use.
pub fn value_order(a: &Value, b: &Value) -> Ordering {
    a.cmp(b)
}

/// Builds a set value from arbitrary elements. Callers reject `■` first.
pub fn canonical_set(values: impl IntoIterator<Item = Value>) -> Value {
    Value::set(values)
}

/// Adds or overrides the binding for `key`.
pub fn map_update(map: &ValueMap, key: Value, value: Value) -> Value {
    let pairs = map.as_slice().iter().cloned();
    Value::map(pairs.chain(std::iter::once((key, value))))
}

/// Last element of a value sequence, `■` when empty.
pub fn last(values: &[Value]) -> Value {
    values.last().cloned().unwrap_or(Value::Bottom)
}

/// The directly contained values. Maps yield all keys followed by all
/// values, both in canonical key order.
pub fn children(v: &Value) -> Vec<Value> {
    match v {
        Value::Basic(_) | Value::Bottom => Vec::new(),
        Value::Cons(_, args) => args.to_vec(),
        Value::List(items) => items.to_vec(),
        Value::Set(items) => items.as_slice().to_vec(),
        Value::Map(pairs) => pairs.keys().chain(pairs.values()).cloned().collect(),
    }
}

/// The mutable evaluation state: variables to values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Store(BTreeMap<Name, Value>);

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn get(&self, x: &str) -> Option<&Value> {
        self.0.get(x)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.contains_key(x)
    }

    pub fn insert(&mut self, x: Name, v: Value) {
        self.0.insert(x, v);
    }

    pub fn remove(&mut self, x: &str) -> Option<Value> {
        self.0.remove(x)
    }

    /// `σρ`: the store extended (and overridden) by an environment.
    pub fn extend(&mut self, env: &Env) {
        for (x, v) in env.iter() {
            self.0.insert(x.clone(), v.clone());
        }
    }

    /// `σ ∖ dom ρ`.
    pub fn remove_all<'a>(&mut self, names: impl IntoIterator<Item = &'a Name>) {
        for x in names {
            self.0.remove(x);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Name, Value)> for Store {
    fn from_iter<I: IntoIterator<Item = (Name, Value)>>(iter: I) -> Self {
        Store(iter.into_iter().collect())
    }
}

/// A candidate binding produced by pattern matching.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Env(BTreeMap<Name, Value>);

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn singleton(x: Name, v: Value) -> Self {
        let mut env = Env::new();
        env.0.insert(x, v);
        env
    }

    pub fn get(&self, x: &str) -> Option<&Value> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: Name, v: Value) {
        self.0.insert(x, v);
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Name, Value)> for Env {
    fn from_iter<I: IntoIterator<Item = (Name, Value)>>(iter: I) -> Self {
        Env(iter.into_iter().collect())
    }
}

/// Why an evaluation produced `error`.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ErrorKind {
    #[error("variable `{0}` has no value")]
    UnboundVariable(Name),
    #[error("operator `{op}` is not defined for {operands}")]
    Operator { op: &'static str, operands: String },
    #[error("constructor `{0}` applied to ill-typed or undefined arguments")]
    ConstructorArgs(Name),
    #[error("collection contains the undefined value")]
    UndefinedElement,
    #[error("value is not a map")]
    NotAMap,
    #[error("value is not a collection")]
    NotACollection,
    #[error("condition is not a Boolean")]
    NotABoolean,
    #[error("function `{0}` applied to ill-typed arguments")]
    ArgumentType(Name),
    #[error("function `{0}` produced a value outside its return type")]
    ReturnType(Name),
    #[error("`{0}` escaped the body of function `{1}`")]
    EscapedControl(&'static str, Name),
    #[error("value assigned to `{0}` does not conform to its declared type")]
    AssignType(Name),
    #[error("`{0}` is not a declared variable")]
    NotAssignable(Name),
    #[error("solve variable `{0}` has no value")]
    SolveUnbound(Name),
    #[error("traversal could not rebuild a value from its replacement children")]
    Reconstruct,
    #[error("`{0}` is not defined")]
    Undefined(Name),
}

/// An `error` result together with where it arose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuntimeError {
    pub kind: ErrorKind,
    pub span: Span,
}

impl RuntimeError {
    pub fn new(kind: ErrorKind, span: Span) -> Self {
        RuntimeError { kind, span }
    }
}

impl fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

/// Exceptional results.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExRes {
    Return(Value),
    Throw(Value),
    Break,
    Continue,
    Fail,
    Error(RuntimeError),
}

impl ExRes {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ExRes::Return(_) => "return",
            ExRes::Throw(_) => "throw",
            ExRes::Break => "break",
            ExRes::Continue => "continue",
            ExRes::Fail => "fail",
            ExRes::Error(_) => "error",
        }
    }

    pub fn payload(&self) -> Option<&Value> {
        match self {
            ExRes::Return(v) | ExRes::Throw(v) => Some(v),
            _ => None,
        }
    }
}

/// `success v | exres`.
pub type VRes = Result<Value, ExRes>;

/// `success v | fail`, the result shape of visitor steps. `None` is `fail`.
pub type VFRes = Option<Value>;

/// `success v | error` from reconstruction.
pub type RcRes = Result<Value, ErrorKind>;

/// `success ρ̄ | exres` from generators.
pub type EnvRes = Result<Vec<Env>, ExRes>;

/// Fuel-bounded results: a regular result or `timeout`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VTRes {
    Done(VRes),
    Timeout,
}

impl VTRes {
    pub fn is_timeout(&self) -> bool {
        matches!(self, VTRes::Timeout)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            VTRes::Done(Ok(_)) => "success",
            VTRes::Done(Err(e)) => e.kind_name(),
            VTRes::Timeout => "timeout",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> Vec<Value> {
        vec![
            Value::int(-1),
            Value::int(0),
            Value::int(1),
            Value::int(2),
            Value::str(""),
            Value::str("a"),
            Value::bool(true),
            Value::bool(false),
            Value::cons("succ", [Value::cons("zero", [])]),
            Value::cons("zero", []),
            Value::list([]),
            Value::list([Value::int(1)]),
            Value::list([Value::int(1), Value::int(2)]),
            Value::set([]),
            Value::set([Value::int(1)]),
            Value::set([Value::int(2), Value::int(1)]),
            Value::map([]),
            Value::map([(Value::int(1), Value::int(2))]),
            Value::map([(Value::int(1), Value::int(3))]),
            Value::Bottom,
        ]
    }

    #[test]
    fn order_examples() {
        assert_eq!(value_order(&Value::int(1), &Value::int(2)), Ordering::Less);
        assert_eq!(
            value_order(&Value::bool(true), &Value::bool(true)),
            Ordering::Equal
        );
        assert_eq!(
            value_order(&Value::list([Value::int(1)]), &Value::set([Value::int(1)])),
            Ordering::Less
        );
    }

    #[test]
    fn order_is_total_on_corpus() {
        let vs = corpus();
        assert_eq!(vs.len(), 20);
        for a in &vs {
            for b in &vs {
                let ab = value_order(a, b);
                assert_eq!(ab, value_order(b, a).reverse(), "antisymmetry {a:?} {b:?}");
                assert_eq!(ab == Ordering::Equal, a == b, "consistent with equality");
                for c in &vs {
                    if ab != Ordering::Greater && value_order(b, c) != Ordering::Greater {
                        assert_ne!(value_order(a, c), Ordering::Greater, "transitivity");
                    }
                }
            }
        }
    }

    #[test]
    fn kind_tags_rank_in_declared_order() {
        let ranked = [
            Value::str("zzz"),
            Value::cons("a", []),
            Value::list([]),
            Value::set([]),
            Value::map([]),
            Value::Bottom,
        ];
        for w in ranked.windows(2) {
            assert!(w[0] < w[1], "{:?} < {:?}", w[0], w[1]);
        }
        assert!(Value::int(1000) < Value::str(""));
    }

    #[test]
    fn canonical_set_examples() {
        let v = canonical_set([Value::int(1), Value::int(2), Value::int(1)]);
        assert_eq!(v, Value::set([Value::int(1), Value::int(2)]));
        assert_eq!(canonical_set([]), Value::set([]));
        let Value::Set(s) = canonical_set([Value::int(3), Value::int(1), Value::int(2)]) else {
            unreachable!()
        };
        assert_eq!(s.as_slice(), &[Value::int(1), Value::int(2), Value::int(3)]);
    }

    #[test]
    fn map_update_examples() {
        let m = ValueMap::new([(Value::int(1), Value::int(2))]);
        assert_eq!(
            map_update(&m, Value::int(1), Value::int(3)),
            Value::map([(Value::int(1), Value::int(3))])
        );
        assert_eq!(
            map_update(&ValueMap::empty(), Value::int(1), Value::int(2)),
            Value::map([(Value::int(1), Value::int(2))])
        );
        let m = ValueMap::new([(Value::int(1), Value::int(2)), (Value::int(5), Value::int(6))]);
        let Value::Map(out) = map_update(&m, Value::int(3), Value::int(4)) else {
            unreachable!()
        };
        let keys: Vec<_> = out.keys().cloned().collect();
        assert_eq!(keys, vec![Value::int(1), Value::int(3), Value::int(5)]);
    }

    #[test]
    fn map_update_last_write_wins() {
        let m = ValueMap::new([(Value::int(1), Value::int(2))]);
        let Value::Map(once) = map_update(&m, Value::int(1), Value::int(7)) else {
            unreachable!()
        };
        let twice = map_update(&once, Value::int(1), Value::int(9));
        assert_eq!(twice, Value::map([(Value::int(1), Value::int(9))]));
    }

    #[test]
    fn last_examples() {
        assert_eq!(last(&[Value::int(1), Value::int(2), Value::int(3)]), Value::int(3));
        assert_eq!(last(&[]), Value::Bottom);
        assert_eq!(last(&[Value::Bottom]), Value::Bottom);
    }

    #[test]
    fn children_examples() {
        let e = Value::cons("plus", [Value::cons("intlit", [Value::int(0)]), Value::cons("intlit", [Value::int(1)])]);
        assert_eq!(
            children(&e),
            vec![Value::cons("intlit", [Value::int(0)]), Value::cons("intlit", [Value::int(1)])]
        );
        assert!(children(&Value::int(42)).is_empty());
        let m = Value::map([(Value::int(3), Value::int(4)), (Value::int(1), Value::int(2))]);
        assert_eq!(
            children(&m),
            vec![Value::int(1), Value::int(3), Value::int(2), Value::int(4)]
        );
    }

    #[test]
    fn children_are_strictly_smaller() {
        for v in corpus() {
            for c in children(&v) {
                assert!(c.size() < v.size());
            }
        }
    }

    #[test]
    fn canonical_set_is_idempotent() {
        let Value::Set(s) = canonical_set([Value::int(2), Value::int(2), Value::int(0)]) else {
            unreachable!()
        };
        assert_eq!(canonical_set(s.as_slice().to_vec()), Value::Set(s));
    }
}
