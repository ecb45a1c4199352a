mod common;

use common::*;
use rascal_light::parser::{parse_module, parse_pattern, render_expr, render_module, render_pattern};

#[test]
fn example_programs_round_trip_through_the_renderer() {
    for name in ["prod.rsl", "simplifier.rsl", "knapsack.rsl", "fixpoint.rsl", "infincrement.rsl"] {
        let m = program(name);
        let text = render_module(m.def());
        let again = parse_module(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(render_module(&again), text, "{name}");
    }
}

#[test]
fn patterns_round_trip() {
    for src in ["[*xs, 1, *ys]", "{x, *rest}", "/int n : m", "! plus(x, _y)", "node(leaf(1), t)"] {
        let p = parse_pattern(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        assert_eq!(parse_pattern(&render_pattern(&p)).unwrap(), p, "{src}");
    }
}

#[test]
fn deeply_nested_input_does_not_overflow_the_stack() {
    let depth = 5_000;
    let src = format!("{}0{}", "[".repeat(depth), "]".repeat(depth));
    let m = module("");
    let e = snippet(&m, &src);
    assert_eq!(render_expr(&e), src);
    let r = eval(&format!("{}1{}", "-(".repeat(depth), ")".repeat(depth)));
    assert_eq!(r, ok("1"));
}
