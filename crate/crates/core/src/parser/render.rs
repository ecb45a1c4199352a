//! Rendering of modules, expressions, patterns and values as source text.
//!
//! The output is accepted by the parser and parses back to an equal tree.
//! Parentheses are inserted only where the grammar would otherwise read the
//! text differently.

use std::fmt::Write;

use crate::ast::{
    Case, Expr, ExprKind, FunDef, Generator, ModuleDef, Pattern, StarPattern, UnOp,
};
use crate::typing::Type;
use crate::value::{Basic, Value};

const TOP: u8 = 0;
const OPERAND: u8 = 1;
const UNARY: u8 = 7;
const POSTFIX: u8 = 8;

pub fn render_type(t: &Type) -> String {
    t.to_string()
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn basic(b: &Basic) -> String {
    match b {
        Basic::Int(i) => i.to_string(),
        Basic::Str(s) => quote(s),
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

pub fn render_value(v: &Value) -> String {
    match v {
        Value::Basic(b) => basic(b),
        Value::Cons(k, args) => format!("{k}({})", join(args, render_value)),
        Value::List(items) => format!("[{}]", join(items, render_value)),
        Value::Set(items) => format!("{{{}}}", join(items.as_slice(), render_value)),
        Value::Map(pairs) => format!(
            "({})",
            join(pairs.as_slice(), |(k, v)| format!("{}: {}", render_value(k), render_value(v)))
        ),
        Value::Bottom => "<undefined>".to_string(),
    }
}

pub fn render_pattern(p: &Pattern) -> String {
    crate::deep(|| pattern_inner(p))
}

fn pattern_inner(p: &Pattern) -> String {
    match p {
        Pattern::Basic(b) => basic(b),
        Pattern::Var(x) => x.name.to_string(),
        Pattern::Deconstructor(k, ps) => format!("{k}({})", join(ps, render_pattern)),
        Pattern::TypedLabelled(t, x, p) => format!("{t} {x} : {}", render_pattern(p)),
        Pattern::List(ps) => format!("[{}]", join(ps, star)),
        Pattern::Set(ps) => format!("{{{}}}", join(ps, star)),
        Pattern::Negation(p) => format!("!{}", render_pattern(p)),
        Pattern::Descendant(p) => {
            // `//` would start a comment.
            let inner = render_pattern(p);
            let sep = if inner.starts_with('/') { " " } else { "" };
            format!("/{sep}{inner}")
        }
    }
}

fn star(p: &StarPattern) -> String {
    match p {
        StarPattern::Ordinary(p) => render_pattern(p),
        StarPattern::Star(x) => format!("*{}", x.name),
    }
}

pub fn render_expr(e: &Expr) -> String {
    expr(e, TOP)
}

/// Whether the rightmost open form of `e` is a `try ... catch` without a
/// `finally`, which would claim a following `finally` for itself.
fn ends_in_try_catch(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::TryCatch(..) => true,
        ExprKind::Return(a) | ExprKind::Throw(a) | ExprKind::Assign(_, a) => ends_in_try_catch(a),
        ExprKind::If(_, _, b) | ExprKind::For(_, b) | ExprKind::While(_, b) | ExprKind::Solve(_, b) => {
            ends_in_try_catch(b)
        }
        _ => false,
    }
}

fn paren(s: String) -> String {
    format!("({s})")
}

/// An expression in a position where a leading `{` opens a block.
fn body(e: &Expr) -> String {
    let s = expr(e, TOP);
    if s.starts_with('{') {
        paren(s)
    } else {
        s
    }
}

fn cases(cs: &[Case]) -> String {
    if cs.is_empty() {
        return "{ }".to_string();
    }
    let inner = cs
        .iter()
        .map(|c| format!("case {} => {}", render_pattern(&c.pattern), body(&c.body)))
        .collect::<Vec<_>>()
        .join("; ");
    format!("{{ {inner} }}")
}

fn expr(e: &Expr, ctx: u8) -> String {
    crate::deep(|| expr_inner(e, ctx))
}

fn expr_inner(e: &Expr, ctx: u8) -> String {
    let wrap_open = |s: String| if ctx > TOP { paren(s) } else { s };
    match &e.kind {
        ExprKind::Basic(b) => basic(b),
        ExprKind::Var(x) => x.name.to_string(),
        ExprKind::Unary(op, a) => {
            let mut inner = expr(a, UNARY);
            if *op == UnOp::Neg && inner.starts_with(|c: char| c.is_ascii_digit()) {
                inner = paren(inner);
            }
            let s = format!("{}{inner}", op.symbol());
            if ctx > UNARY {
                paren(s)
            } else {
                s
            }
        }
        ExprKind::Binary(a, op, b) => {
            let p = op.precedence();
            let s = format!("{} {} {}", expr(a, p), op.symbol(), expr(b, p + 1));
            if ctx > p {
                paren(s)
            } else {
                s
            }
        }
        ExprKind::Cons(k, args) | ExprKind::Call(k, args) => {
            format!("{k}({})", join(args, |a| expr(a, TOP)))
        }
        ExprKind::List(es) => format!("[{}]", join(es, |a| expr(a, TOP))),
        ExprKind::Set(es) => format!("{{{}}}", join(es, |a| expr(a, TOP))),
        ExprKind::Map(pairs) => format!(
            "({})",
            join(pairs, |(k, v)| format!("{}: {}", expr(k, TOP), expr(v, TOP)))
        ),
        ExprKind::Lookup(a, k) => format!("{}[{}]", expr(a, POSTFIX), expr(k, OPERAND)),
        ExprKind::Update(a, k, v) => format!(
            "{}[{} = {}]",
            expr(a, POSTFIX),
            expr(k, OPERAND),
            expr(v, TOP)
        ),
        ExprKind::Return(a) => wrap_open(format!("return {}", expr(a, TOP))),
        ExprKind::Throw(a) => wrap_open(format!("throw {}", expr(a, TOP))),
        ExprKind::Assign(x, a) => wrap_open(format!("{} = {}", x.name, expr(a, TOP))),
        ExprKind::If(c, a, b) => wrap_open(format!(
            "if ({}) {} else {}",
            expr(c, TOP),
            body(a),
            body(b)
        )),
        ExprKind::Switch(s, cs) => format!("switch ({}) {}", expr(s, TOP), cases(cs)),
        ExprKind::Visit(st, s, cs) => {
            format!("{} visit ({}) {}", st.keyword(), expr(s, TOP), cases(cs))
        }
        ExprKind::Break => "break".to_string(),
        ExprKind::Continue => "continue".to_string(),
        ExprKind::Fail => "fail".to_string(),
        ExprKind::Block(decls, es) => {
            let mut s = String::from("local");
            if !decls.is_empty() {
                s.push(' ');
                s.push_str(&join(decls, |d| format!("{} {}", d.ty, d.name)));
            }
            s.push_str(" in");
            for (i, e) in es.iter().enumerate() {
                s.push_str(if i == 0 { " " } else { "; " });
                s.push_str(&expr(e, TOP));
            }
            s.push_str(" end");
            s
        }
        ExprKind::For(g, b) => {
            let g = match &**g {
                Generator::Enumerating(x, e) => format!("{x} <- {}", expr(e, TOP)),
                Generator::Matching(p, e) => format!("{} := {}", render_pattern(p), expr(e, TOP)),
            };
            wrap_open(format!("for ({g}) {}", body(b)))
        }
        ExprKind::While(c, b) => wrap_open(format!("while ({}) {}", expr(c, TOP), body(b))),
        ExprKind::Solve(xs, b) => wrap_open(format!(
            "solve ({}) {}",
            join(xs, |x| x.name.to_string()),
            body(b)
        )),
        ExprKind::TryCatch(a, x, h) => {
            wrap_open(format!("try {} catch {x} => {}", body(a), body(h)))
        }
        ExprKind::TryFinally(a, f) => {
            let first = if ends_in_try_catch(a) {
                paren(expr(a, TOP))
            } else {
                body(a)
            };
            wrap_open(format!("try {first} finally {}", body(f)))
        }
    }
}

fn function(f: &FunDef) -> String {
    format!(
        "{} {}({}) = {};",
        f.ret,
        f.name,
        join(&f.params, |p| format!("{} {}", p.ty, p.name)),
        body(&f.body)
    )
}

pub fn render_module(m: &ModuleDef) -> String {
    let mut out = String::new();
    for d in &m.datatypes {
        let cons = d
            .constructors
            .iter()
            .map(|k| format!("{}({})", k.name, join(&k.fields, |(t, f)| format!("{t} {f}"))))
            .collect::<Vec<_>>()
            .join(" | ");
        let _ = writeln!(out, "data {} = {cons};", d.name);
    }
    for g in &m.globals {
        let _ = writeln!(out, "global {} {} = {};", g.ty, g.name, expr(&g.init, TOP));
    }
    for f in &m.functions {
        let _ = writeln!(out, "{}", function(f));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_module, parse_value};

    fn roundtrip_expr(src: &str) {
        let e = parse_expr(src).unwrap();
        let text = render_expr(&e);
        let again = parse_expr(&text).unwrap_or_else(|err| panic!("{text}: {err}"));
        assert_eq!(e, again, "{text}");
    }

    #[test]
    fn value_rendering() {
        assert_eq!(render_value(&Value::Bottom), "<undefined>");
        assert_eq!(render_value(&Value::set([Value::int(2), Value::int(1)])), "{1, 2}");
        assert_eq!(
            render_value(&Value::map([(Value::int(1), Value::str("a\"b"))])),
            "(1: \"a\\\"b\")"
        );
        assert_eq!(render_value(&Value::cons("zero", [])), "zero()");
        for v in [
            Value::list([Value::int(-4), Value::map([])]),
            Value::cons("k", [Value::set([]), Value::str("\n")]),
        ] {
            assert_eq!(parse_value(&render_value(&v)).unwrap(), v);
        }
    }

    #[test]
    fn tricky_expressions_roundtrip() {
        for src in [
            "-(3)",
            "-(-3)",
            "-x[1]",
            "(-x)[1]",
            "-3[1]",
            "1 - -3",
            "(1 + 2) * 3",
            "1 - (2 - 3)",
            "(x = 1) + 2",
            "m[(x = 1)]",
            "m[k = v = 2]",
            "try (try a catch x => b) finally c",
            "try a catch x => try b finally c",
            "for (x <- xs) ({1})",
            "if (c) ({1} + {2}) else local in end",
            "switch (x) { case int y : 1 => (y = 2) }",
            "f(return 1, throw 2)",
            "(if (a) b else c)[1]",
            "!(!(x))",
        ] {
            roundtrip_expr(src);
        }
    }

    #[test]
    fn module_roundtrip() {
        let src = "data Nat = zero() | succ(Nat pred);\n\
                   global map[int, str] names = ();\n\
                   int prod(list[int] xs) { int res = 1; for (x <- xs) { if (x == 0) return 0; else res *= x; }; res }\n\
                   Nat id(Nat n) = { n };";
        let m = parse_module(src).unwrap();
        let text = render_module(&m);
        assert_eq!(parse_module(&text).unwrap(), m, "{text}");
    }
}
