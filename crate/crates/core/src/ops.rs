//! The built-in unary and binary operator tables.
//!
//! Every operator is total: operands outside its domain, as well as division
//! or remainder by zero, produce an error. Integer division truncates toward
//! zero and the remainder takes the sign of the dividend.

use num_traits::Zero;

use crate::ast::{BinOp, UnOp};
use crate::value::{Basic, ErrorKind, Value, ValueMap};

fn describe(v: &Value) -> &'static str {
    match v {
        Value::Basic(Basic::Int(_)) => "int",
        Value::Basic(Basic::Str(_)) => "str",
        Value::Cons(..) => "constructor",
        Value::List(_) => "list",
        Value::Set(_) => "set",
        Value::Map(_) => "map",
        Value::Bottom => "undefined",
    }
}

fn unary_mismatch(op: UnOp, v: &Value) -> ErrorKind {
    ErrorKind::Operator {
        op: op.symbol(),
        operands: describe(v).to_string(),
    }
}

fn binary_mismatch(op: BinOp, a: &Value, b: &Value) -> ErrorKind {
    ErrorKind::Operator {
        op: op.symbol(),
        operands: format!("{} and {}", describe(a), describe(b)),
    }
}

pub fn apply_unary(op: UnOp, v: &Value) -> Result<Value, ErrorKind> {
    match (op, v) {
        (UnOp::Neg, Value::Basic(Basic::Int(i))) => Ok(Value::int(-i)),
        (UnOp::Not, v) => match v.as_bool() {
            Some(b) => Ok(Value::bool(!b)),
            None => Err(unary_mismatch(op, v)),
        },
        _ => Err(unary_mismatch(op, v)),
    }
}

pub fn apply_binary(op: BinOp, a: &Value, b: &Value) -> Result<Value, ErrorKind> {
    use Value::Basic as B;
    let mismatch = || binary_mismatch(op, a, b);
    match op {
        BinOp::Add => match (a, b) {
            (B(Basic::Int(x)), B(Basic::Int(y))) => Ok(Value::int(x + y)),
            (B(Basic::Str(x)), B(Basic::Str(y))) => Ok(Value::str(&format!("{x}{y}"))),
            (Value::List(x), Value::List(y)) => Ok(Value::list(x.iter().chain(y.iter()).cloned())),
            (Value::Set(x), Value::Set(y)) => Ok(Value::set(
                x.as_slice().iter().chain(y.as_slice()).cloned(),
            )),
            (Value::Map(x), Value::Map(y)) => Ok(Value::Map(ValueMap::new(
                x.as_slice().iter().chain(y.as_slice()).cloned(),
            ))),
            _ => Err(mismatch()),
        },
        BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
            let (B(Basic::Int(x)), B(Basic::Int(y))) = (a, b) else {
                return Err(mismatch());
            };
            match op {
                BinOp::Sub => Ok(Value::int(x - y)),
                BinOp::Mul => Ok(Value::int(x * y)),
                _ if y.is_zero() => Err(ErrorKind::Operator {
                    op: op.symbol(),
                    operands: "a zero divisor".to_string(),
                }),
                BinOp::Div => Ok(Value::int(x / y)),
                _ => Ok(Value::int(x % y)),
            }
        }
        BinOp::Eq => Ok(Value::bool(a == b)),
        BinOp::Neq => Ok(Value::bool(a != b)),
        BinOp::Lt => Ok(Value::bool(a < b)),
        BinOp::Le => Ok(Value::bool(a <= b)),
        BinOp::Gt => Ok(Value::bool(a > b)),
        BinOp::Ge => Ok(Value::bool(a >= b)),
        BinOp::And | BinOp::Or => match (a.as_bool(), b.as_bool()) {
            (Some(x), Some(y)) => Ok(Value::bool(if op == BinOp::And { x && y } else { x || y })),
            _ => Err(mismatch()),
        },
        BinOp::In => match b {
            Value::List(items) => Ok(Value::bool(items.contains(a))),
            Value::Set(items) => Ok(Value::bool(items.contains(a))),
            Value::Map(pairs) => Ok(Value::bool(pairs.get(a).is_some())),
            _ => Err(mismatch()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&i| Value::int(i)).collect()
    }

    #[test]
    fn negation_examples() {
        assert_eq!(apply_unary(UnOp::Neg, &Value::int(3)), Ok(Value::int(-3)));
        assert!(apply_unary(UnOp::Neg, &Value::set([])).is_err());
        assert_eq!(apply_unary(UnOp::Not, &Value::bool(true)), Ok(Value::bool(false)));
        assert!(apply_unary(UnOp::Not, &Value::int(0)).is_err());
    }

    #[test]
    fn addition_table() {
        assert_eq!(
            apply_binary(BinOp::Add, &Value::list(ints(&[1])), &Value::list(ints(&[2]))),
            Ok(Value::list(ints(&[1, 2])))
        );
        assert_eq!(
            apply_binary(BinOp::Add, &Value::set(ints(&[2, 1])), &Value::set(ints(&[3, 1]))),
            Ok(Value::set(ints(&[1, 2, 3])))
        );
        assert_eq!(
            apply_binary(BinOp::Add, &Value::str("ab"), &Value::str("c")),
            Ok(Value::str("abc"))
        );
        let m1 = Value::map([(Value::int(1), Value::int(1)), (Value::int(2), Value::int(2))]);
        let m2 = Value::map([(Value::int(2), Value::int(9))]);
        assert_eq!(
            apply_binary(BinOp::Add, &m1, &m2),
            Ok(Value::map([(Value::int(1), Value::int(1)), (Value::int(2), Value::int(9))]))
        );
        assert!(apply_binary(BinOp::Add, &Value::int(1), &Value::str("a")).is_err());
        assert!(apply_binary(BinOp::Add, &Value::Bottom, &Value::int(1)).is_err());
    }

    #[test]
    fn arithmetic_and_zero_division() {
        assert_eq!(apply_binary(BinOp::Div, &Value::int(-7), &Value::int(2)), Ok(Value::int(-3)));
        assert_eq!(apply_binary(BinOp::Mod, &Value::int(-7), &Value::int(2)), Ok(Value::int(-1)));
        assert!(apply_binary(BinOp::Div, &Value::int(1), &Value::int(0)).is_err());
        assert!(apply_binary(BinOp::Mod, &Value::int(1), &Value::int(0)).is_err());
        assert!(apply_binary(BinOp::Mul, &Value::str("a"), &Value::int(2)).is_err());
    }

    #[test]
    fn comparison_uses_value_order() {
        assert_eq!(apply_binary(BinOp::Lt, &Value::int(1), &Value::int(2)), Ok(Value::bool(true)));
        assert_eq!(
            apply_binary(BinOp::Lt, &Value::list([]), &Value::set([])),
            Ok(Value::bool(true))
        );
        assert_eq!(apply_binary(BinOp::Eq, &Value::Bottom, &Value::Bottom), Ok(Value::bool(true)));
    }

    #[test]
    fn logic_and_membership() {
        assert_eq!(
            apply_binary(BinOp::Or, &Value::bool(false), &Value::bool(true)),
            Ok(Value::bool(true))
        );
        assert!(apply_binary(BinOp::And, &Value::int(1), &Value::bool(true)).is_err());
        let m = Value::map([(Value::int(1), Value::int(2))]);
        assert_eq!(apply_binary(BinOp::In, &Value::int(1), &m), Ok(Value::bool(true)));
        assert_eq!(apply_binary(BinOp::In, &Value::int(2), &m), Ok(Value::bool(false)));
        assert!(apply_binary(BinOp::In, &Value::int(1), &Value::int(1)).is_err());
    }
}
