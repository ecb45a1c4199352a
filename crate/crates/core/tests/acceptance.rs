//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit status if
//! any criterion fails. Built with `harness = false`, so `cargo test` runs
//! `main` directly.

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rascal_light::eval::{TraceEvent, UNBOUNDED};
use rascal_light::fuel::{apply_function, apply_function_traced, init_module};
use rascal_light::harness::{run_suite, Report, Suite};
use rascal_light::parser::{parse_module, parse_value, render_value};
use rascal_light::validate::Module;
use rascal_light::value::{VTRes, Value};

const SEED: u64 = 20_260_419;

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(suite: Suite, cases: usize, time_limit: Option<Duration>) -> Outcome {
    let report = run_suite(suite, cases, SEED, None);
    let mut pass = report.failures.is_empty() && report.checked >= cases;
    let mut detail = summary(&report);
    if report.checked < cases {
        detail.push_str(&format!("; only {} of {cases} cases qualified", report.checked));
    }
    if let Some(limit) = time_limit {
        if report.elapsed > limit {
            pass = false;
            detail.push_str(&format!("; over the {}s budget", limit.as_secs()));
        }
    }
    Outcome { pass, detail }
}

fn summary(r: &Report) -> String {
    let mut s = r.to_string().replace('\n', ";");
    for f in r.failures.iter().take(3) {
        s.push_str(&format!("\n      case {}: {}", f.index, f.message));
    }
    s
}

// ---- golden programs -------------------------------------------------------

fn program(name: &str) -> Module {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs").join(name);
    let src = std::fs::read_to_string(&path).expect("program file");
    Module::new(parse_module(&src).expect("parses")).expect("well formed")
}

fn call(m: &Module, f: &str, args: &[&str]) -> VTRes {
    let store = init_module(m).expect("globals initialize");
    let args = args.iter().map(|a| parse_value(a).expect("value literal")).collect();
    apply_function(m, &store, f, args, UNBOUNDED).expect("within resource limits").0
}

/// Expression trees for the rewriting oracle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Term {
    Lit(i64),
    Var(String),
    Plus(Box<Term>, Box<Term>),
}

fn plus(a: Term, b: Term) -> Term {
    Term::Plus(Box::new(a), Box::new(b))
}

impl Term {
    fn render(&self) -> String {
        match self {
            Term::Lit(n) => format!("intlit({n})"),
            Term::Var(x) => format!("var(\"{x}\")"),
            Term::Plus(a, b) => format!("plus({}, {})", a.render(), b.render()),
        }
    }

    fn size(&self) -> usize {
        match self {
            Term::Plus(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Every term reachable by rewriting one redex anywhere in `self`.
    fn one_step(&self) -> Vec<Term> {
        let mut out = Vec::new();
        if let Term::Plus(a, b) = self {
            if **a == Term::Lit(0) {
                out.push((**b).clone());
            }
            if **b == Term::Lit(0) {
                out.push((**a).clone());
            }
            out.extend(a.one_step().into_iter().map(|a2| plus(a2, (**b).clone())));
            out.extend(b.one_step().into_iter().map(|b2| plus((**a).clone(), b2)));
        }
        out
    }

    fn has_zero_addition(&self) -> bool {
        match self {
            Term::Plus(a, b) => {
                **a == Term::Lit(0) || **b == Term::Lit(0) || a.has_zero_addition() || b.has_zero_addition()
            }
            _ => false,
        }
    }
}

/// All normal forms reachable from `t`, by exploring every rewrite order.
fn normal_forms(t: &Term) -> BTreeSet<Term> {
    let mut seen = BTreeSet::from([t.clone()]);
    let mut queue = VecDeque::from([t.clone()]);
    let mut normal = BTreeSet::new();
    while let Some(t) = queue.pop_front() {
        let next = t.one_step();
        if next.is_empty() {
            normal.insert(t);
        }
        for n in next {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    normal
}

fn check(ok: bool, what: impl Into<String>, errors: &mut Vec<String>) {
    if !ok {
        errors.push(what.into());
    }
}

fn simplifier_golden(errors: &mut Vec<String>) {
    let (l0, x) = (|| Term::Lit(0), Term::Var("x".into()));
    let input = plus(
        plus(l0(), plus(x, l0())),
        plus(plus(l0(), l0()), plus(plus(Term::Lit(7), l0()), l0())),
    );
    check(input.size() == 15, format!("input has {} nodes", input.size()), errors);
    let forms = normal_forms(&input);
    let Some(expected) = forms.first().filter(|_| forms.len() == 1) else {
        errors.push(format!("rewriting is not confluent: {forms:?}"));
        return;
    };
    check(!expected.has_zero_addition(), "oracle normal form still adds zero", errors);
    let m = program("simplifier.rsl");
    let got = call(&m, "simplify", &[&input.render()]);
    let want = VTRes::Done(Ok(parse_value(&expected.render()).unwrap()));
    check(got == want, format!("simplify gave {got:?}, oracle {}", expected.render()), errors);
}

fn fixpoint_golden(errors: &mut Vec<String>) {
    // The chain the iteration must walk, computed directly.
    let limit = 3;
    let mut chain = vec![0];
    loop {
        let x = *chain.last().unwrap();
        let next = if x < limit { x + 1 } else { x };
        if next == x {
            break;
        }
        chain.push(next);
    }
    let m = program("fixpoint.rsl");
    let mut events: Vec<TraceEvent> = Vec::new();
    let store = init_module(&m).unwrap();
    let arg = parse_value(&format!("upto({limit})")).unwrap();
    let (r, _) = apply_function_traced(&m, &store, "fix", vec![arg], UNBOUNDED, &mut events).unwrap();
    let want = format!("lv({})", chain.last().unwrap());
    check(r == VTRes::Done(Ok(parse_value(&want).unwrap())), format!("fix gave {r:?}, want {want}"), errors);
    let count = |rule| events.iter().filter(|e| e.rule == rule).count();
    let changes = chain.len() - 1;
    check(count("E-Solve-Neq") == changes, format!("{} changing iterations, want {changes}", count("E-Solve-Neq")), errors);
    check(count("E-Solve-Eq") == 1, format!("{} stable iterations, want 1", count("E-Solve-Eq")), errors);
}

fn knapsack_golden(errors: &mut Vec<String>) {
    let items = [(1, 60), (2, 100), (3, 120)];
    let max_weight = 5;
    // Brute force: the best total worth within the weight bound.
    let mut best: Option<(i64, Vec<(i64, i64)>)> = None;
    for mask in 0u32..1 << items.len() {
        let chosen: Vec<_> = (0..items.len()).filter(|i| mask & (1 << i) != 0).map(|i| items[i]).collect();
        let weight: i64 = chosen.iter().map(|c| c.0).sum();
        let worth: i64 = chosen.iter().map(|c| c.1).sum();
        if weight <= max_weight && best.as_ref().is_none_or(|(w, _)| worth > *w) {
            best = Some((worth, chosen));
        }
    }
    let (_, chosen) = best.unwrap();
    let set = |xs: &[(i64, i64)]| {
        Value::set(xs.iter().map(|(w, v)| Value::cons("item", [Value::int(*w), Value::int(*v)])))
    };
    let m = program("knapsack.rsl");
    let got = call(&m, "slowknapsack", &[&render_value(&set(&items)), &max_weight.to_string()]);
    let want = VTRes::Done(Ok(set(&chosen)));
    check(got == want, format!("knapsack gave {got:?}, want {}", render_value(&set(&chosen))), errors);
    check(
        render_value(&set(&chosen)) == "{item(2, 100), item(3, 120)}",
        "brute force disagrees with the expected subset",
        errors,
    );
}

fn prod_golden(errors: &mut Vec<String>) {
    let m = program("prod.rsl");
    for (arg, want) in [("[1, 2, 0, 3]", 0), ("[1, 2, 3]", 6)] {
        let got = call(&m, "prod", &[arg]);
        check(got == VTRes::Done(Ok(Value::int(want))), format!("prod({arg}) gave {got:?}"), errors);
    }
}

fn goldens() -> Outcome {
    let start = Instant::now();
    let mut errors = Vec::new();
    simplifier_golden(&mut errors);
    fixpoint_golden(&mut errors);
    knapsack_golden(&mut errors);
    prod_golden(&mut errors);
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(5) {
        errors.push(format!("took {elapsed:.2?}, over the 5s budget"));
    }
    Outcome {
        pass: errors.is_empty(),
        detail: if errors.is_empty() {
            format!("simplifier, fixpoint, knapsack and prod match their oracles ({elapsed:.2?})")
        } else {
            errors.join("; ")
        },
    }
}

fn round_trips() -> Outcome {
    let render = suite(Suite::Render, 2_000, None);
    let rebuild = suite(Suite::Reconstruct, 5_000, None);
    Outcome {
        pass: render.pass && rebuild.pass,
        detail: format!("{}\n      {}", render.detail, rebuild.detail),
    }
}

fn main() -> ExitCode {
    let minute = Some(Duration::from_secs(60));
    type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        ("backtracking purity", Box::new(move || suite(Suite::Purity, 10_000, minute))),
        ("strong typing", Box::new(|| suite(Suite::Typing, 10_000, None))),
        ("partial progress", Box::new(|| suite(Suite::Progress, 10_000, None))),
        ("termination", Box::new(|| suite(Suite::Termination, 1_000, None))),
        ("example programs", Box::new(goldens)),
        ("matching oracle", Box::new(|| suite(Suite::Matching, 5_000, None))),
        ("fuel agreement and monotonicity", Box::new(|| suite(Suite::Fuel, 2_000, None))),
        ("round trips", Box::new(round_trips)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}. {name}: {}", i + 1, out.detail);
        failed += usize::from(!out.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
