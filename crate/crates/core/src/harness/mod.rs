//! Property suites over generated programs.
//!
//! Every case is generated from `(seed, index)` alone, so any failure can be
//! replayed in isolation. Cases run in parallel in fixed-size batches, which
//! keeps reports deterministic. Failing modules are shrunk and written out
//! as `.rsl` files.

pub mod adversarial;
pub mod gen;
pub mod oracle;
pub mod shrink;

use std::collections::BTreeSet;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::ast::{is_finite_subset_with, Expr, ExprKind, ModuleDef, Pattern};
use crate::eval::{eval_expr, Fuel, ResourceExhausted};
use crate::fuel::{eval_cases_fuel, eval_expr_bounded, eval_expr_fuel, init_module, min_sufficient_fuel, FuelError};
use crate::parser::{expr_to_value, parse_module, parse_value, render_module, render_pattern, render_value};
use crate::pattern::match_pattern;
use crate::traversal::reconstruct;
use crate::typing::{conforms, type_of};
use crate::validate::Module;
use crate::value::{children, ExRes, Store, VRes, VTRes, Value};

use gen::{Gen, GenBudget, Scenario, Subset, ENTRY};

/// Fuel for suites that need programs to terminate.
pub const TYPING_FUEL: Fuel = 10_000;
/// The fuels at which the progress suite runs every program.
pub const PROGRESS_FUELS: [Fuel; 4] = [0, 1, 7, 1_000];
/// Cap on judgments per run; see [`crate::eval::Interpreter::with_step_limit`].
pub const STEP_LIMIT: u64 = 200_000;
/// Upper end of the fuel search in the termination suite.
pub const TERMINATION_CAP: Fuel = 1 << 20;

const BATCH: usize = 256;
/// Filtering suites give up after this many attempts per requested case.
const ATTEMPT_FACTOR: usize = 20;
const SHRINK_TRIES: usize = 400;
const MAX_ARTIFACTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Suite {
    /// A failing `cases` judgment leaves the store as it found it.
    Purity,
    /// Terminating programs only produce well-typed values.
    Typing,
    /// Fuel-bounded evaluation always yields a result.
    Progress,
    /// Programs in the terminating fragment need only finite fuel.
    Termination,
    /// Pattern matching agrees with a brute-force oracle.
    Matching,
    /// Fuel-bounded and unbounded evaluation agree.
    Fuel,
    /// Rendering a module and parsing it back is the identity.
    Render,
    /// Rebuilding a value from its children is the identity.
    Reconstruct,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Purity,
        Suite::Typing,
        Suite::Progress,
        Suite::Termination,
        Suite::Matching,
        Suite::Fuel,
        Suite::Render,
        Suite::Reconstruct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Purity => "purity",
            Suite::Typing => "typing",
            Suite::Progress => "progress",
            Suite::Termination => "termination",
            Suite::Matching => "matching",
            Suite::Fuel => "fuel",
            Suite::Render => "render",
            Suite::Reconstruct => "reconstruct",
        }
    }

    /// Suites whose property has a premise; cases that miss it are skipped
    /// and more are generated until enough were checked.
    fn filters(self) -> bool {
        matches!(self, Suite::Purity | Suite::Typing | Suite::Termination | Suite::Fuel)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of checking one case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The property's premise did not hold, or a resource cap was hit.
    Skip,
    Fail(String),
}

/// One generated test input.
#[derive(Clone, Debug)]
pub enum Case {
    Module(ModuleDef),
    Scenario(Scenario),
    Match(Pattern, Value, Store),
    Value(Value),
}

fn store_comment(store: &Store) -> String {
    store
        .iter()
        .map(|(x, v)| format!("// store: {x} = {}\n", render_value(v)))
        .collect()
}

impl Case {
    /// The case as source text; non-module parts become comments.
    pub fn source(&self) -> String {
        match self {
            Case::Module(def) => render_module(def),
            Case::Scenario(sc) => format!("{}{}", store_comment(&sc.store), render_module(&sc.module)),
            Case::Match(p, v, store) => format!(
                "// pattern: {}\n// value: {}\n{}",
                render_pattern(p),
                render_value(v),
                store_comment(store)
            ),
            Case::Value(v) => format!("// value: {}\n", render_value(v)),
        }
    }

    fn module(&self) -> Option<&ModuleDef> {
        match self {
            Case::Module(def) => Some(def),
            Case::Scenario(sc) => Some(&sc.module),
            _ => None,
        }
    }

    fn with_module(&self, def: ModuleDef) -> Case {
        match self {
            Case::Scenario(sc) => Case::Scenario(Scenario {
                module: def,
                store: sc.store.clone(),
            }),
            _ => Case::Module(def),
        }
    }
}

/// The input of case `index` of `suite`.
pub fn generate(suite: Suite, budget: &GenBudget, seed: u64, index: u64) -> Case {
    let mut g = Gen::new(budget, seed, index);
    match suite {
        Suite::Purity => Case::Scenario(g.cases_triple()),
        Suite::Progress => Case::Scenario(g.scenario(Subset::All)),
        Suite::Typing | Suite::Fuel | Suite::Render => Case::Module(g.program(Subset::All)),
        Suite::Termination => Case::Module(g.program(Subset::Finite)),
        Suite::Matching => {
            let (p, v, s) = g.match_instance();
            Case::Match(p, v, s)
        }
        Suite::Reconstruct => Case::Value(g.any_value(3)),
    }
}

/// Checks one case, turning panics into failures.
pub fn check(suite: Suite, case: &Case) -> Verdict {
    match catch_unwind(AssertUnwindSafe(|| check_inner(suite, case))) {
        Ok(v) => v,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            Verdict::Fail(format!("panicked: {msg}"))
        }
    }
}

fn check_inner(suite: Suite, case: &Case) -> Verdict {
    match (suite, case) {
        (Suite::Purity, Case::Scenario(sc)) => check_purity(sc),
        (Suite::Typing, Case::Module(def)) => check_typing(def),
        (Suite::Progress, Case::Scenario(sc)) => check_progress(&sc.module, &sc.store),
        (Suite::Termination, Case::Module(def)) => check_termination(def),
        (Suite::Matching, Case::Match(p, v, s)) => check_matching(p, v, s),
        (Suite::Fuel, Case::Module(def)) => check_fuel(def),
        (Suite::Render, Case::Module(def)) => check_render(def),
        (Suite::Reconstruct, Case::Value(v)) => check_reconstruct(v),
        _ => Verdict::Fail(format!("case shape does not fit suite {suite}")),
    }
}

fn load(def: &ModuleDef) -> Result<Module, Verdict> {
    Module::new(def.clone()).map_err(|errs| {
        let msgs: Vec<String> = errs.iter().map(ToString::to_string).collect();
        Verdict::Fail(format!("generated module is not well formed: {}", msgs.join("; ")))
    })
}

fn entry(module: &Module) -> Result<&Expr, Verdict> {
    module
        .function(ENTRY)
        .map(|f| &f.body)
        .ok_or_else(|| Verdict::Fail(format!("module has no `{ENTRY}`")))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(verdict) => return verdict,
        }
    };
}

/// Runs the global initializers with bounded fuel and steps; `None` when any
/// of them does not produce a conforming value.
fn init_bounded(module: &Module, fuel: Fuel) -> Option<Store> {
    let mut store = Store::new();
    for g in &module.def().globals {
        match eval_expr_bounded(module, &g.init, &store, fuel, STEP_LIMIT) {
            Ok((VTRes::Done(Ok(v)), s)) if conforms(&v, &g.ty, module.data()) => {
                store = s;
                store.insert(g.name.clone(), v);
            }
            _ => return None,
        }
    }
    Some(store)
}

fn check_purity(sc: &Scenario) -> Verdict {
    let module = tri!(load(&sc.module));
    let body = tri!(entry(&module));
    let ExprKind::Switch(scrut, cases) = &body.kind else {
        return Verdict::Fail("entry is not a switch".into());
    };
    let Some(v) = expr_to_value(scrut) else {
        return Verdict::Fail("scrutinee is not a literal".into());
    };
    match eval_cases_fuel(&module, cases, &v, &sc.store, TYPING_FUEL, Some(STEP_LIMIT)) {
        Ok((VTRes::Done(Err(ExRes::Fail)), after)) => {
            if after == sc.store {
                Verdict::Pass
            } else {
                Verdict::Fail(format!("store changed by failing cases: {after:?}"))
            }
        }
        _ => Verdict::Skip,
    }
}

fn well_typed(v: &Value, module: &Module, what: &str) -> Result<(), String> {
    type_of(v, module.data())
        .map(|_| ())
        .map_err(|e| format!("{what} {} is ill formed: {e}", render_value(v)))
}

/// The payload a result carries, if any.
fn payload(r: &VRes) -> Option<&Value> {
    match r {
        Ok(v) => Some(v),
        Err(x) => x.payload(),
    }
}

fn check_typing(def: &ModuleDef) -> Verdict {
    let module = tri!(load(def));
    let body = tri!(entry(&module));
    let Some(store) = init_bounded(&module, TYPING_FUEL) else {
        return Verdict::Skip;
    };
    let (r, after) = match eval_expr_bounded(&module, body, &store, TYPING_FUEL, STEP_LIMIT) {
        Ok((VTRes::Done(r), after)) => (r, after),
        _ => return Verdict::Skip,
    };
    let mut problems = Vec::new();
    if let Some(v) = payload(&r) {
        problems.extend(well_typed(v, &module, "result").err());
    }
    for (x, v) in after.iter() {
        problems.extend(well_typed(v, &module, &format!("value of `{x}`")).err());
    }
    for g in &module.def().globals {
        if let Some(v) = after.get(&g.name) {
            if !conforms(v, &g.ty, module.data()) {
                problems.push(format!("global `{}` holds {} outside {}", g.name, render_value(v), g.ty));
            }
        }
    }
    if problems.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

/// Runs `e` at every progress fuel. Hitting the step cap is not a failure
/// but makes the case count as skipped.
fn progress_at_fuels(module: &Module, e: &Expr, store: &Store) -> Verdict {
    let mut capped = false;
    for fuel in PROGRESS_FUELS {
        match eval_expr_bounded(module, e, store, fuel, STEP_LIMIT) {
            Ok((r, _)) => {
                if fuel == 0 && !r.is_timeout() {
                    return Verdict::Fail(format!("fuel 0 gave {} instead of timeout", r.kind_name()));
                }
            }
            Err(ResourceExhausted::Steps { .. }) => capped = true,
            Err(e) => return Verdict::Fail(format!("fuel {fuel}: {e}")),
        }
    }
    if capped {
        Verdict::Skip
    } else {
        Verdict::Pass
    }
}

fn check_progress(def: &ModuleDef, store: &Store) -> Verdict {
    let module = tri!(load(def));
    let body = tri!(entry(&module));
    progress_at_fuels(&module, body, store)
}

/// Checks one program of the adversarial corpus at all progress fuels,
/// with the store its initializers produce (or an empty one).
pub fn check_progress_source(src: &str) -> Verdict {
    let run = || {
        let def = match parse_module(src) {
            Ok(d) => d,
            Err(e) => return Verdict::Fail(format!("does not parse: {e}")),
        };
        let module = tri!(load(&def));
        let body = tri!(entry(&module));
        let store = init_bounded(&module, 1_000).unwrap_or_default();
        progress_at_fuels(&module, body, &store)
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(v) => v,
        Err(_) => Verdict::Fail("panicked".into()),
    }
}

fn check_termination(def: &ModuleDef) -> Verdict {
    let is_function = |name: &str| def.functions.iter().any(|f| &*f.name == name);
    let all_finite = def.functions.iter().all(|f| is_finite_subset_with(&f.body, &is_function))
        && def.globals.iter().all(|g| is_finite_subset_with(&g.init, &is_function));
    if !all_finite {
        return Verdict::Fail("generated program leaves the terminating fragment".into());
    }
    let module = tri!(load(def));
    let body = tri!(entry(&module));
    let store = match init_module(&module) {
        Ok(s) => s,
        Err(_) => return Verdict::Skip,
    };
    let found = match min_sufficient_fuel(&module, body, &store, TERMINATION_CAP) {
        Ok(f) => f,
        Err(FuelError::Exceeded(cap)) => return Verdict::Fail(format!("no fuel up to {cap} suffices")),
        Err(FuelError::Resource(e)) => return Verdict::Fail(e.to_string()),
    };
    tri!(monotone_from(&module, body, &store, found.fuel, &found.result, &found.store, &[]));
    Verdict::Pass
}

/// Checks that `fuel` is the least sufficient fuel for `e` and that every
/// larger fuel in `{fuel + 1, 2 fuel} ∪ extra` gives the same outcome.
fn monotone_from(
    module: &Module,
    e: &Expr,
    store: &Store,
    fuel: Fuel,
    result: &VRes,
    after: &Store,
    extra: &[Fuel],
) -> Result<(), Verdict> {
    let run = |n: Fuel| eval_expr_fuel(module, e, store, n).map_err(|err| Verdict::Fail(err.to_string()));
    if fuel > 0 {
        let (below, _) = run(fuel - 1)?;
        if !below.is_timeout() {
            return Err(Verdict::Fail(format!(
                "fuel {} already gives {} below the minimum {fuel}",
                fuel - 1,
                below.kind_name()
            )));
        }
    }
    let mut fuels = vec![fuel, fuel + 1, fuel.saturating_mul(2)];
    fuels.extend_from_slice(extra);
    for n in fuels {
        let (r, s) = run(n)?;
        if r != VTRes::Done(result.clone()) || &s != after {
            return Err(Verdict::Fail(format!(
                "fuel {n} gives {} where fuel {fuel} gave {}",
                r.kind_name(),
                VTRes::Done(result.clone()).kind_name()
            )));
        }
    }
    Ok(())
}

fn check_fuel(def: &ModuleDef) -> Verdict {
    let module = tri!(load(def));
    let body = tri!(entry(&module));
    let Some(store) = init_bounded(&module, TYPING_FUEL) else {
        return Verdict::Skip;
    };
    let (fueled, fueled_store) = match eval_expr_bounded(&module, body, &store, TYPING_FUEL, STEP_LIMIT) {
        Ok((VTRes::Done(r), s)) => (r, s),
        _ => return Verdict::Skip,
    };
    match eval_expr(&module, body, &store) {
        Ok((r, s)) if r == fueled && s == fueled_store => {}
        Ok((r, _)) => {
            return Verdict::Fail(format!(
                "unbounded run gave {} but fuel {TYPING_FUEL} gave {}",
                kind(&r),
                kind(&fueled)
            ))
        }
        Err(e) => return Verdict::Fail(format!("unbounded run: {e}")),
    }
    let least = match min_sufficient_fuel(&module, body, &store, TYPING_FUEL) {
        Ok(f) => f,
        Err(e) => return Verdict::Fail(format!("fuel search: {e}")),
    };
    tri!(monotone_from(&module, body, &store, least.fuel, &fueled, &fueled_store, &[TYPING_FUEL]));
    Verdict::Pass
}

fn kind(r: &VRes) -> &'static str {
    match r {
        Ok(_) => "success",
        Err(x) => x.kind_name(),
    }
}

fn check_render(def: &ModuleDef) -> Verdict {
    let text = render_module(def);
    match parse_module(&text) {
        Ok(back) if &back == def => Verdict::Pass,
        Ok(_) => Verdict::Fail("parsed module differs from the original".into()),
        Err(e) => Verdict::Fail(format!("rendered module does not parse: {e}")),
    }
}

fn check_reconstruct(v: &Value) -> Verdict {
    let data = crate::validate::data_env(&ModuleDef {
        datatypes: gen::default_datatypes(),
        ..ModuleDef::default()
    });
    match reconstruct(v, &children(v), &data) {
        Ok(w) if &w == v => {}
        Ok(w) => return Verdict::Fail(format!("rebuilt as {}", render_value(&w))),
        Err(e) => return Verdict::Fail(format!("reconstruction failed: {e}")),
    }
    match parse_value(&render_value(v)) {
        Ok(w) if &w == v => Verdict::Pass,
        _ => Verdict::Fail("value does not survive rendering".into()),
    }
}

fn check_matching(p: &Pattern, v: &Value, store: &Store) -> Verdict {
    let data = crate::validate::data_env(&ModuleDef {
        datatypes: gen::default_datatypes(),
        ..ModuleDef::default()
    });
    let expected = match oracle::oracle_match(p, v, store, &data) {
        Ok(envs) => envs,
        Err(_) => return Verdict::Skip,
    };
    let actual: BTreeSet<_> = match_pattern(p, v, store, &data).into_iter().collect();
    if actual == expected {
        Verdict::Pass
    } else {
        Verdict::Fail(format!(
            "matcher found {} environments, oracle {}",
            actual.len(),
            expected.len()
        ))
    }
}

/// One failing case.
#[derive(Clone, Debug)]
pub struct Failure {
    pub index: u64,
    pub message: String,
    pub artifact: Option<PathBuf>,
}

/// Summary of a suite run.
#[derive(Clone, Debug)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub generated: usize,
    /// Cases whose premise held, including failing ones.
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<Failure>,
    /// Programs of the adversarial corpus run by the progress suite.
    pub corpus: usize,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} checked, {} skipped, {} failed ({} generated, seed {}, {:.2}s)",
            self.suite,
            self.checked,
            self.skipped,
            self.failures.len(),
            self.generated,
            self.seed,
            self.elapsed.as_secs_f64()
        )?;
        if self.corpus > 0 {
            write!(f, "\n  adversarial corpus: {} programs", self.corpus)?;
        }
        for fail in &self.failures {
            write!(f, "\n  case {}: {}", fail.index, fail.message)?;
            if let Some(p) = &fail.artifact {
                write!(f, " [{}]", p.display())?;
            }
        }
        Ok(())
    }
}

/// Runs `cases` cases of `suite` with the default budget.
pub fn run_suite(suite: Suite, cases: usize, seed: u64, artifacts: Option<&Path>) -> Report {
    run_suite_with(suite, cases, seed, artifacts, &GenBudget::default())
}

pub fn run_suite_with(
    suite: Suite,
    cases: usize,
    seed: u64,
    artifacts: Option<&Path>,
    budget: &GenBudget,
) -> Report {
    let start = Instant::now();
    let max_attempts = if suite.filters() {
        cases.saturating_mul(ATTEMPT_FACTOR)
    } else {
        cases
    };
    let mut report = Report {
        suite,
        seed,
        generated: 0,
        checked: 0,
        skipped: 0,
        failures: Vec::new(),
        corpus: 0,
        elapsed: Duration::ZERO,
    };
    let mut failing_cases = Vec::new();
    while report.checked < cases && report.generated < max_attempts {
        let n = BATCH.min(max_attempts - report.generated);
        let lo = report.generated as u64;
        for (index, verdict) in run_batch(suite, budget, seed, lo..lo + n as u64) {
            match verdict {
                Verdict::Pass => report.checked += 1,
                Verdict::Skip => report.skipped += 1,
                Verdict::Fail(message) => {
                    report.checked += 1;
                    failing_cases.push(index);
                    report.failures.push(Failure {
                        index,
                        message,
                        artifact: None,
                    });
                }
            }
        }
        report.generated += n;
    }
    if suite == Suite::Progress {
        for (i, src) in adversarial::corpus().iter().enumerate() {
            report.corpus += 1;
            if let Verdict::Fail(message) = check_progress_source(src) {
                report.failures.push(Failure {
                    index: u64::MAX - i as u64,
                    message: format!("adversarial program {i}: {message}"),
                    artifact: None,
                });
            }
        }
    }
    if let Some(dir) = artifacts {
        for fail in report.failures.iter_mut().take(MAX_ARTIFACTS) {
            if failing_cases.contains(&fail.index) {
                let case = generate(suite, budget, seed, fail.index);
                fail.artifact = write_artifact(dir, suite, seed, fail, &case).ok();
            }
        }
    }
    report.elapsed = start.elapsed();
    report
}

fn run_batch(suite: Suite, budget: &GenBudget, seed: u64, range: std::ops::Range<u64>) -> Vec<(u64, Verdict)> {
    let indices: Vec<u64> = range.collect();
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(indices.len()));
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(16);
    std::thread::scope(|s| {
        for _ in 0..threads {
            std::thread::Builder::new()
                .stack_size(64 << 20)
                .spawn_scoped(s, || loop {
                    let k = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&index) = indices.get(k) else { break };
                    let case = generate(suite, budget, seed, index);
                    let verdict = check(suite, &case);
                    results.lock().expect("no poisoned lock").push((index, verdict));
                })
                .expect("spawn worker");
        }
    });
    let mut out = results.into_inner().expect("no poisoned lock");
    out.sort_by_key(|(i, _)| *i);
    out
}

/// The part of a failure message before any details, used to keep shrinking
/// on the same failure.
fn category(message: &str) -> &str {
    message.split(':').next().unwrap_or(message)
}

/// Shrinks the failing case when it is a module and writes it to `dir`.
fn write_artifact(dir: &Path, suite: Suite, seed: u64, fail: &Failure, case: &Case) -> std::io::Result<PathBuf> {
    let shrunk = match case.module() {
        Some(def) => {
            let kind = category(&fail.message);
            let small = shrink::shrink(
                def,
                |d| match check(suite, &case.with_module(d.clone())) {
                    Verdict::Fail(m) => category(&m) == kind,
                    _ => false,
                },
                SHRINK_TRIES,
            );
            case.with_module(small)
        }
        None => case.clone(),
    };
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{suite}-{seed}-{}.rsl", fail.index));
    let text = format!(
        "// suite {suite}, seed {seed}, case {}\n// {}\n{}",
        fail.index,
        fail.message.replace('\n', " "),
        shrunk.source()
    );
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Regenerates and checks a single case of a run.
pub fn replay(suite: Suite, seed: u64, index: u64) -> (Case, Verdict) {
    let case = generate(suite, &GenBudget::default(), seed, index);
    let verdict = check(suite, &case);
    (case, verdict)
}
