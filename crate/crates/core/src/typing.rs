//! Value typing, subtyping and least upper bounds.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::ast::Name;
use crate::value::{Basic, Value};

/// Types of values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Int,
    Str,
    Adt(Name),
    Set(Box<Type>),
    List(Box<Type>),
    Map(Box<Type>, Box<Type>),
    Void,
    Value,
}

impl Type {
    pub fn list(t: Type) -> Type {
        Type::List(Box::new(t))
    }

    pub fn set(t: Type) -> Type {
        Type::Set(Box::new(t))
    }

    pub fn map(k: Type, v: Type) -> Type {
        Type::Map(Box::new(k), Box::new(v))
    }

    pub fn adt(name: &str) -> Type {
        Type::Adt(Arc::from(name))
    }

    /// Nesting depth; base types have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Type::Set(t) | Type::List(t) => 1 + t.depth(),
            Type::Map(k, v) => 1 + k.depth().max(v.depth()),
            _ => 1,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Str => f.write_str("str"),
            Type::Adt(n) => f.write_str(n),
            Type::Set(t) => write!(f, "set<{t}>"),
            Type::List(t) => write!(f, "list<{t}>"),
            Type::Map(k, v) => write!(f, "map<{k}, {v}>"),
            Type::Void => f.write_str("void"),
            Type::Value => f.write_str("value"),
        }
    }
}

/// Declared signature of one constructor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsSig {
    pub datatype: Name,
    pub fields: Vec<(Type, Name)>,
}

impl ConsSig {
    pub fn arity(&self) -> usize {
        self.fields.len()
    }

    pub fn field_types(&self) -> impl Iterator<Item = &Type> {
        self.fields.iter().map(|(t, _)| t)
    }
}

/// The constructor declarations visible to typing. Always contains the
/// built-in `Bool` and `NoKey` datatypes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataEnv {
    constructors: BTreeMap<Name, ConsSig>,
    datatypes: BTreeMap<Name, Vec<Name>>,
}

pub const BUILTIN_DATATYPES: [&str; 2] = ["Bool", "NoKey"];
pub const BUILTIN_CONSTRUCTORS: [&str; 3] = ["true", "false", "nokey"];

impl Default for DataEnv {
    fn default() -> Self {
        Self::builtin()
    }
}

impl DataEnv {
    pub fn builtin() -> Self {
        let mut env = DataEnv {
            constructors: BTreeMap::new(),
            datatypes: BTreeMap::new(),
        };
        env.declare("Bool", "true", vec![]);
        env.declare("Bool", "false", vec![]);
        env.declare("NoKey", "nokey", vec![(Type::Value, Arc::from("key"))]);
        env
    }

    /// Adds a constructor. A later declaration of the same constructor name
    /// replaces the earlier one; validation reports such clashes separately.
    pub fn declare(&mut self, datatype: &str, cons: &str, fields: Vec<(Type, Name)>) {
        let datatype: Name = Arc::from(datatype);
        let cons: Name = Arc::from(cons);
        let members = self.datatypes.entry(datatype.clone()).or_default();
        if !members.contains(&cons) {
            members.push(cons.clone());
        }
        self.constructors.insert(cons, ConsSig { datatype, fields });
    }

    pub fn constructor(&self, k: &str) -> Option<&ConsSig> {
        self.constructors.get(k)
    }

    pub fn has_datatype(&self, at: &str) -> bool {
        self.datatypes.contains_key(at)
    }

    /// Constructor names of a datatype in declaration order.
    pub fn constructors_of(&self, at: &str) -> &[Name] {
        self.datatypes.get(at).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn datatype_names(&self) -> impl Iterator<Item = &Name> {
        self.datatypes.keys()
    }
}

/// A constructor value that does not conform to its declaration. Values
/// built by the evaluator never trigger this; seeing it means a bug.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("ill-formed value: {0}")]
pub struct IllFormedValue(pub String);

/// The canonical type of a value.
pub fn type_of(v: &Value, data: &DataEnv) -> Result<Type, IllFormedValue> {
    match v {
        Value::Basic(Basic::Int(_)) => Ok(Type::Int),
        Value::Basic(Basic::Str(_)) => Ok(Type::Str),
        Value::Bottom => Ok(Type::Void),
        Value::Cons(k, args) => {
            let sig = data
                .constructor(k)
                .ok_or_else(|| IllFormedValue(format!("unknown constructor `{k}`")))?;
            if sig.arity() != args.len() {
                return Err(IllFormedValue(format!(
                    "`{k}` expects {} fields, found {}",
                    sig.arity(),
                    args.len()
                )));
            }
            for (arg, (expected, field)) in args.iter().zip(&sig.fields) {
                let actual = type_of(arg, data)?;
                if !subtype(&actual, expected) {
                    return Err(IllFormedValue(format!(
                        "field `{field}` of `{k}` has type {actual}, expected {expected}"
                    )));
                }
            }
            Ok(Type::Adt(sig.datatype.clone()))
        }
        Value::List(items) => Ok(Type::list(lub_of_values(items, data)?)),
        Value::Set(items) => Ok(Type::set(lub_of_values(items.as_slice(), data)?)),
        Value::Map(pairs) => {
            let keys: Vec<Type> = pairs
                .keys()
                .map(|k| type_of(k, data))
                .collect::<Result<_, _>>()?;
            let vals: Vec<Type> = pairs
                .values()
                .map(|v| type_of(v, data))
                .collect::<Result<_, _>>()?;
            Ok(Type::map(lub_seq(&keys), lub_seq(&vals)))
        }
    }
}

fn lub_of_values(items: &[Value], data: &DataEnv) -> Result<Type, IllFormedValue> {
    let types: Vec<Type> = items
        .iter()
        .map(|v| type_of(v, data))
        .collect::<Result<_, _>>()?;
    Ok(lub_seq(&types))
}

/// `value_conforms(v, t)`: `v` is well typed with a type that is a subtype of `t`.
pub fn conforms(v: &Value, t: &Type, data: &DataEnv) -> bool {
    matches!(type_of(v, data), Ok(actual) if subtype(&actual, t))
}

/// The subtype relation.
pub fn subtype(t1: &Type, t2: &Type) -> bool {
    if t1 == t2 || *t1 == Type::Void || *t2 == Type::Value {
        return true;
    }
    match (t1, t2) {
        (Type::List(a), Type::List(b)) | (Type::Set(a), Type::Set(b)) => subtype(a, b),
        (Type::Map(k1, v1), Type::Map(k2, v2)) => subtype(k1, k2) && subtype(v1, v2),
        _ => false,
    }
}

/// Least upper bound of two types.
pub fn lub(t1: &Type, t2: &Type) -> Type {
    if *t2 == Type::Void || t1 == t2 {
        return t1.clone();
    }
    if *t1 == Type::Void {
        return t2.clone();
    }
    match (t1, t2) {
        (Type::List(a), Type::List(b)) => Type::list(lub(a, b)),
        (Type::Set(a), Type::Set(b)) => Type::set(lub(a, b)),
        (Type::Map(k1, v1), Type::Map(k2, v2)) => Type::map(lub(k1, k2), lub(v1, v2)),
        _ => Type::Value,
    }
}

/// Folds [`lub`] from the right; the empty sequence yields `void`.
pub fn lub_seq(ts: &[Type]) -> Type {
    ts.iter().rev().fold(Type::Void, |acc, t| lub(t, &acc))
}
