mod common;

use common::*;
use rascal_light::ast::{Case, Expr, ExprKind, Generator};
use rascal_light::eval::{eval_case, eval_cases, eval_each, eval_expr_star, eval_gen, TraceEvent};
use rascal_light::fuel::{eval_expr_traced, init_module, InitError};
use rascal_light::value::{Env, ErrorKind, ExRes, Store, VTRes, Value};

fn switch_parts(m: &rascal_light::validate::Module, src: &str) -> (Expr, Vec<Case>) {
    match snippet(m, src).kind {
        ExprKind::Switch(scrut, cases) => (*scrut, cases),
        other => panic!("not a switch: {other:?}"),
    }
}

fn error_kind(r: &rascal_light::value::VRes) -> &ErrorKind {
    match r {
        Err(ExRes::Error(e)) => &e.kind,
        other => panic!("expected error, got {other:?}"),
    }
}

fn env(pairs: &[(&str, Value)]) -> Env {
    let mut e = Env::new();
    for (x, v) in pairs {
        e.insert((*x).into(), v.clone());
    }
    e
}

#[test]
fn globals_initialize_in_order() {
    let m = module("global int g = 1 + 2;\nglobal int h = g * 2;");
    let store = init_module(&m).unwrap();
    assert_eq!(store.get("g"), Some(&Value::int(3)));
    assert_eq!(store.get("h"), Some(&Value::int(6)));
    assert!(init_module(&module("")).unwrap().is_empty());
}

#[test]
fn failing_initializers_are_reported() {
    // A global that reads a later global sees it unassigned.
    let m = module("global int g = h;\nglobal int h = 1;");
    match init_module(&m) {
        Err(InitError::Exceptional { name, result }) => {
            assert_eq!(&*name, "g");
            assert_eq!(result.kind_name(), "error");
        }
        other => panic!("{other:?}"),
    }
    let m = module("global int g = \"s\";");
    assert!(matches!(init_module(&m), Err(InitError::TypeMismatch(_))));
}

#[test]
fn expression_examples() {
    assert_eq!(eval("switch (1) { case 2 => 3 }"), Ok(Value::Bottom));
    assert_eq!(eval("(1: 2)[3]"), Err(ExRes::Throw(value("nokey(3)"))));
    assert_eq!(eval("(1: 2)[1]"), ok("2"));
    assert_eq!(eval("while (false()) 1"), Ok(Value::Bottom));
    assert_eq!(eval("-3"), ok("-3"));
    assert_eq!(eval("[1] + [2]"), ok("[1, 2]"));
    assert_eq!(eval("{2, 1} + {3}"), ok("{1, 2, 3}"));
    assert_eq!(eval("(1: 2) + (1: 3, 4: 5)"), ok("(1: 3, 4: 5)"));
    assert_eq!(eval("\"ab\" + \"c\""), ok("\"abc\""));
    assert_eq!(eval("2 in {1, 2}"), ok("true()"));
    assert_eq!(eval("[1] < {1}"), ok("true()"));
    assert!(matches!(error_kind(&eval("-{}")), ErrorKind::Operator { .. }));
    assert!(matches!(error_kind(&eval("1 / 0")), ErrorKind::Operator { .. }));
}

#[test]
fn early_return_from_a_loop() {
    let m = program("prod.rsl");
    assert_eq!(call(&m, "prod", &["[1, 2, 0, 3]"]), VTRes::Done(ok("0")));
    assert_eq!(call(&m, "prod", &["[1, 2, 3]"]), VTRes::Done(ok("6")));
    assert_eq!(call(&m, "prod", &["[]"]), VTRes::Done(ok("1")));
}

#[test]
fn solve_reaches_the_chain_fixpoint() {
    let decls = "int f(int v) = if (v + 1 < 3) v + 1 else 3;\n\
                 int lub(int a, int b) = if (a < b) b else a;";
    let r = eval_with(decls, "local int v in v = 0; solve (v) v = lub(v, f(v)); v end");
    assert_eq!(r, ok("3"));
}

#[test]
fn calls_check_argument_and_result_types() {
    let decls = "int f(int x) = x;\nint g() = \"s\";\nvalue h() = break;";
    assert!(matches!(error_kind(&eval_with(decls, "f(\"a\")")), ErrorKind::ArgumentType(_)));
    assert!(matches!(error_kind(&eval_with(decls, "g()")), ErrorKind::ReturnType(_)));
    assert!(matches!(error_kind(&eval_with(decls, "h()")), ErrorKind::EscapedControl(..)));
    assert_eq!(eval_with("int f() = return 4;", "f()"), ok("4"));
    assert_eq!(eval_with("int f() = throw 4;", "f()"), Err(ExRes::Throw(Value::int(4))));
}

#[test]
fn calls_see_updated_globals_but_not_caller_locals() {
    let decls = "global int g = 1;\nint bump() = g = g + 1;";
    let (r, store) = eval_in(&module(decls), "local in bump(); bump() end");
    assert_eq!(r, ok("3"));
    assert_eq!(store.get("g"), Some(&Value::int(3)));
}

#[test]
fn sequences_stop_at_the_first_exception() {
    let m = module("global int x = 0;");
    let items = match snippet(&m, "[1, 2, 3]").kind {
        ExprKind::List(es) => es,
        _ => unreachable!(),
    };
    let store = init_module(&m).unwrap();
    let (r, _) = eval_expr_star(&m, &items, &store).unwrap();
    assert_eq!(r, Ok(vec![Value::int(1), Value::int(2), Value::int(3)]));

    let items = match snippet(&m, "[1, throw 2, x = 5]").kind {
        ExprKind::List(es) => es,
        _ => unreachable!(),
    };
    let (r, after) = eval_expr_star(&m, &items, &store).unwrap();
    assert_eq!(r, Err(ExRes::Throw(Value::int(2))));
    assert_eq!(after.get("x"), Some(&Value::int(0)));

    let (r, _) = eval_expr_star(&m, &[], &store).unwrap();
    assert_eq!(r, Ok(vec![]));
}

#[test]
fn cases_restore_the_store_between_alternatives() {
    let m = module("global int g = 0;");
    let store = init_module(&m).unwrap();
    let (_, cases) = switch_parts(&m, "switch (0) { case 1 => fail; case x => x }");
    let (r, _) = eval_cases(&m, &cases, &Value::int(1), &store).unwrap();
    assert_eq!(r, ok("1"));

    let (_, cases) = switch_parts(&m, "switch (0) { case x => local in g = 9; fail end; case y => g }");
    let (r, after) = eval_cases(&m, &cases, &Value::int(1), &store).unwrap();
    assert_eq!(r, ok("0"));
    assert_eq!(after.get("g"), Some(&Value::int(0)));

    let (_, only) = switch_parts(&m, "switch (0) { case x => local in g = x; fail end }");
    let (r, after) = eval_cases(&m, &only, &Value::int(5), &store).unwrap();
    assert_eq!(r, Err(ExRes::Fail));
    assert_eq!(after, store);

    let (r, after) = eval_cases(&m, &[], &Value::int(5), &store).unwrap();
    assert_eq!((r, after), (Err(ExRes::Fail), store));
}

#[test]
fn case_bodies_run_once_per_binding() {
    let m = module("");
    let (_, cases) = switch_parts(&m, "switch (0) { case x => x }");
    let body = &cases[0].body;
    let (r, after) = eval_case(&m, &[env(&[("x", Value::int(1))])], body, &Store::new()).unwrap();
    assert_eq!(r, ok("1"));
    assert!(!after.contains("x"));

    let (_, cases) = switch_parts(&m, "switch (0) { case x => if (x == 1) fail else x }");
    let body = &cases[0].body;
    let envs = [env(&[("x", Value::int(1))]), env(&[("x", Value::int(2))])];
    let (r, _) = eval_case(&m, &envs, body, &Store::new()).unwrap();
    assert_eq!(r, ok("2"));

    let (r, _) = eval_case(&m, &[], body, &Store::new()).unwrap();
    assert_eq!(r, Err(ExRes::Fail));
}

#[test]
fn each_handles_loop_control() {
    let m = module("");
    let three: Vec<Env> = (1..=3).map(|i| env(&[("x", Value::int(i))])).collect();
    let body = |src: &str| snippet(&m, src);
    let (r, _) = eval_each(&m, &body("continue"), &three, &Store::new()).unwrap();
    assert_eq!(r, Ok(Value::Bottom));
    let (r, _) = eval_each(&m, &body("break"), &three[..2], &Store::new()).unwrap();
    assert_eq!(r, Ok(Value::Bottom));
    let (r, _) = eval_each(&m, &body("throw 1"), &three, &Store::new()).unwrap();
    assert_eq!(r, Err(ExRes::Throw(Value::int(1))));
}

#[test]
fn for_loops_count_with_break_and_continue() {
    let r = eval("local int n in n = 0; for (x <- [1, 2, 3, 4]) if (x == 3) break else n = n + x; n end");
    assert_eq!(r, ok("3"));
    let r = eval("local int n in n = 0; for (x <- [1, 2, 3, 4]) if (x == 3) continue else n = n + x; n end");
    assert_eq!(r, ok("7"));
}

#[test]
fn generators_enumerate_collections() {
    let m = module("");
    let gen_of = |src: &str| -> Generator {
        match snippet(&m, src).kind {
            ExprKind::For(g, _) => *g,
            _ => unreachable!(),
        }
    };
    let (r, _) = eval_gen(&m, &gen_of("for (x <- [1, 2]) 0"), &Store::new()).unwrap();
    assert_eq!(r, Ok(vec![env(&[("x", Value::int(1))]), env(&[("x", Value::int(2))])]));
    let (r, _) = eval_gen(&m, &gen_of("for (x <- (1: 2, 3: 4)) 0"), &Store::new()).unwrap();
    assert_eq!(r, Ok(vec![env(&[("x", Value::int(1))]), env(&[("x", Value::int(3))])]));
    let (r, _) = eval_gen(&m, &gen_of("for (x <- 5) 0"), &Store::new()).unwrap();
    assert!(matches!(r, Err(ExRes::Error(ref e)) if e.kind == ErrorKind::NotACollection));
}

#[test]
fn try_finally_runs_the_finalizer_and_keeps_the_first_result() {
    let m = module("global int g = 0;");
    let (r, store) = eval_in(&m, "try throw 1 finally g = 5");
    assert_eq!(r, Err(ExRes::Throw(Value::int(1))));
    assert_eq!(store.get("g"), Some(&Value::int(5)));
    assert_eq!(eval("try throw 1 finally throw 2"), Err(ExRes::Throw(Value::int(2))));
    assert_eq!(eval("try throw [1] catch e => e"), ok("[1]"));
}

#[test]
fn map_update_and_lookup() {
    assert_eq!(eval("(1: 2)[1 = 5]"), ok("(1: 5)"));
    assert_eq!(eval("()[\"k\" = 1][\"k\"]"), ok("1"));
    assert!(matches!(error_kind(&eval("1[2]")), ErrorKind::NotAMap));
}

#[test]
fn trace_names_the_rules_that_fired() {
    let m = module("");
    let e = snippet(&m, "switch (1) { case 2 => 3 }");
    let mut events: Vec<TraceEvent> = Vec::new();
    let (r, _) = eval_expr_traced(&m, &e, &Store::new(), 100, &mut events).unwrap();
    assert_eq!(r, VTRes::Done(Ok(Value::Bottom)));
    let rules: Vec<&str> = events.iter().map(|ev| ev.rule).collect();
    assert!(rules.contains(&"E-Switch-Fail"), "{rules:?}");
    assert_eq!(events.last().unwrap().outcome, "success");
}
