mod common;

use common::*;
use rascal_light::ast::{Case, ExprKind, Strategy};
use rascal_light::fuel::apply_function;
use rascal_light::traversal::{bu_visit, bu_visit_star, eval_visit, td_visit, td_visit_star, BreakMode};
use rascal_light::validate::Module;
use rascal_light::value::{ExRes, Store, VTRes, Value};

const EXPR: &str = "data Expr = intlit(int v) | plus(Expr lop, Expr rop) | var(str name);\n";

fn cases(m: &Module, src: &str) -> Vec<Case> {
    match snippet(m, &format!("switch (0) {{ {src} }}")).kind {
        ExprKind::Switch(_, cs) => cs,
        _ => unreachable!(),
    }
}

#[test]
fn simplifier_removes_zero_additions() {
    let m = program("simplifier.rsl");
    let run = |arg: &str| call(&m, "simplify", &[arg]);
    assert_eq!(run("plus(intlit(0), plus(intlit(5), intlit(0)))"), VTRes::Done(ok("intlit(5)")));
    assert_eq!(run("plus(plus(intlit(0), intlit(2)), intlit(0))"), VTRes::Done(ok("intlit(2)")));
    assert_eq!(run("var(\"x\")"), VTRes::Done(ok("var(\"x\")")));
}

#[test]
fn innermost_without_matches_is_the_identity() {
    let m = module(EXPR);
    let cs = cases(&m, "case var(\"never\") => intlit(1)");
    let v = value("plus(intlit(1), intlit(2))");
    let (r, _) = eval_visit(&m, Strategy::Innermost, &cs, &v, &Store::new()).unwrap();
    assert_eq!(r, Ok(v));
}

#[test]
fn outermost_rewrites_until_stable() {
    let m = module(EXPR);
    let cs = cases(&m, "case plus(intlit(0), y) => y");
    let v = value("plus(intlit(0), plus(intlit(0), var(\"a\")))");
    let (r, _) = eval_visit(&m, Strategy::Outermost, &cs, &v, &Store::new()).unwrap();
    assert_eq!(r, ok("var(\"a\")"));
}

#[test]
fn infinite_top_down_growth_times_out() {
    let m = program("infincrement.rsl");
    let store = Store::new();
    let (r, _) = apply_function(&m, &store, "infincrement", vec![value("succ(zero())")], 10_000).unwrap();
    assert_eq!(r, VTRes::Timeout);
    // Nothing to rewrite below `zero()`.
    let (r, _) = apply_function(&m, &store, "infincrement", vec![value("zero()")], 10_000).unwrap();
    assert_eq!(r, VTRes::Done(ok("zero()")));
}

#[test]
fn top_down_steps() {
    let m = module(EXPR);
    let never = cases(&m, "case var(\"never\") => intlit(1)");
    let (r, _) = td_visit(&m, &never, &Value::int(42), &Store::new(), BreakMode::NoBreak).unwrap();
    assert_eq!(r, Ok(None));

    let zero = cases(&m, "case intlit(0) => intlit(9)");
    let v = value("plus(intlit(0), intlit(1))");
    let (r, _) = td_visit(&m, &zero, &v, &Store::new(), BreakMode::NoBreak).unwrap();
    assert_eq!(r, Ok(Some(value("plus(intlit(9), intlit(1))"))));

    let boom = cases(&m, "case plus(x, y) => throw x");
    let (r, _) = td_visit(&m, &boom, &v, &Store::new(), BreakMode::NoBreak).unwrap();
    assert_eq!(r, Err(ExRes::Throw(value("intlit(0)"))));
}

#[test]
fn top_down_sequences() {
    let m = module(EXPR);
    let zero = cases(&m, "case intlit(0) => intlit(9)");
    let (r, _) = td_visit_star(&m, &zero, &[], &Store::new(), BreakMode::NoBreak).unwrap();
    assert_eq!(r, Ok(None));

    let vs = [value("intlit(0)"), value("intlit(1)")];
    let (r, _) = td_visit_star(&m, &zero, &vs, &Store::new(), BreakMode::NoBreak).unwrap();
    assert_eq!(r, Ok(Some(vec![value("intlit(9)"), value("intlit(1)")])));

    let vs = [value("intlit(0)"), value("intlit(0)")];
    let (r, _) = td_visit_star(&m, &zero, &vs, &Store::new(), BreakMode::Break).unwrap();
    assert_eq!(r, Ok(Some(vec![value("intlit(9)"), value("intlit(0)")])));
}

#[test]
fn bottom_up_steps() {
    let m = module(EXPR);
    let never = cases(&m, "case var(\"never\") => intlit(1)");
    let (r, _) = bu_visit(&m, &never, &Value::int(3), &Store::new(), BreakMode::NoBreak).unwrap();
    assert_eq!(r, Ok(None));

    // With break, a child success skips the cases at the parent.
    let cs = cases(&m, "case intlit(0) => intlit(9); case plus(x, y) => var(\"parent\")");
    let v = value("plus(intlit(0), intlit(1))");
    let (r, _) = bu_visit(&m, &cs, &v, &Store::new(), BreakMode::Break).unwrap();
    assert_eq!(r, Ok(Some(value("plus(intlit(9), intlit(1))"))));
    let (r, _) = bu_visit(&m, &cs, &v, &Store::new(), BreakMode::NoBreak).unwrap();
    assert_eq!(r, Ok(Some(value("var(\"parent\")"))));

    let (r, _) = bu_visit_star(&m, &cs, &[], &Store::new(), BreakMode::NoBreak).unwrap();
    assert_eq!(r, Ok(None));
}

#[test]
fn rewriting_that_breaks_typing_is_an_error() {
    let m = module(EXPR);
    let cs = cases(&m, "case intlit(0) => \"zero\"");
    let v = value("plus(intlit(0), intlit(1))");
    let (r, _) = eval_visit(&m, Strategy::BottomUp, &cs, &v, &Store::new()).unwrap();
    assert_eq!(r.unwrap_err().kind_name(), "error");
}

#[test]
fn visits_over_collections() {
    assert_eq!(eval("bottom-up visit ([1, [2, 3]]) { case int n : m => n * 10 }"), ok("[10, [20, 30]]"));
    assert_eq!(eval("bottom-up visit ({1, 2}) { case int n : m => 0 }"), ok("{0}"));
    assert_eq!(eval("bottom-up visit ((1: 2)) { case 1 => 3 }"), ok("(3: 2)"));
    assert_eq!(eval("top-down-break visit ([1, 2]) { case int n : m => 0 }"), ok("[0, 2]"));
}
