//! The `rlight` command line driver.
//!
//! [`run`] does all the work and returns the text for both output streams
//! together with the exit status, which keeps the binary itself trivial and
//! lets tests drive the driver in process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::ast::{ExprKind, ModuleDef};
use crate::eval::{Fuel, ResourceExhausted, TraceEvent, UNBOUNDED};
use crate::fuel::{apply_function_traced, eval_expr_traced, init_module_fuel, InitError};
use crate::harness::{self, Suite};
use crate::parser::{expr_to_value, parse_expr, render_value, SourceFile};
use crate::validate::{Module, WfError};
use crate::value::{ExRes, Store, VTRes, Value};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_THROW: i32 = 2;
pub const EXIT_ERROR: i32 = 3;
pub const EXIT_TIMEOUT: i32 = 4;
pub const EXIT_LOAD: i32 = 5;
pub const EXIT_RESOURCE: i32 = 6;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable holding the default fuel for `run`.
pub const FUEL_ENV: &str = "RLIGHT_FUEL";

/// Version of the `--format tree` document layout.
pub const TREE_FORMAT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "rlight", version, about = "Interpreter for Rascal Light programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load a module and call a function or evaluate an expression.
    Run(RunArgs),
    /// Parse and validate a module without running it.
    Check { file: PathBuf },
    /// Run one of the property suites on generated programs.
    Harness(HarnessArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Module to load. Without it, snippets run against an empty module.
    pub file: Option<PathBuf>,
    /// Function call with literal arguments, e.g. `prod([1, 2, 3])`.
    #[arg(long, conflicts_with = "eval", required_unless_present = "eval")]
    pub call: Option<String>,
    /// Expression to evaluate in the scope of the module's globals.
    #[arg(long)]
    pub eval: Option<String>,
    /// Bound on derivation depth. Unbounded when absent.
    #[arg(long, env = FUEL_ENV)]
    pub fuel: Option<Fuel>,
    /// Print one line per rule application to the error stream.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also print the final values of the globals.
    #[arg(long)]
    pub print_globals: bool,
}

#[derive(Args, Debug, Clone)]
pub struct HarnessArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for minimized counterexamples.
    #[arg(long, default_value = "harness-failures")]
    pub artifacts: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tree,
}

/// Everything a command produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn fail(code: i32, msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Output {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Parses `argv` and runs the command. Usage errors exit with
/// [`EXIT_USAGE`] rather than clap's default, which would collide with the
/// code for `throw`.
pub fn main_with_args<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_SUCCESS };
            let text = e.render().to_string();
            if e.use_stderr() {
                Output::fail(code, text)
            } else {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

pub fn execute(cmd: &Command) -> Output {
    match cmd {
        Command::Run(args) => run(args),
        Command::Check { file } => match load(Some(file)) {
            Ok(_) => Output {
                code: EXIT_SUCCESS,
                stdout: "ok\n".into(),
                stderr: String::new(),
            },
            Err(out) => out,
        },
        Command::Harness(args) => {
            let report = harness::run_suite(args.suite, args.cases, args.seed, Some(&args.artifacts));
            Output {
                code: if report.failures.is_empty() { 0 } else { 1 },
                stdout: format!("{report}\n"),
                stderr: String::new(),
            }
        }
    }
}

fn wf_report(src: &SourceFile, errors: &[WfError]) -> String {
    let mut s = String::new();
    for e in errors {
        let _ = writeln!(s, "{}: error: {e}", src.location(e.span));
    }
    s
}

/// Reads, parses and validates a module; `None` gives the empty module.
pub fn load(path: Option<&PathBuf>) -> Result<(SourceFile, Module), Output> {
    let src = match path {
        None => SourceFile::new("<empty>", ""),
        Some(p) => match std::fs::read_to_string(p) {
            Ok(text) => SourceFile::new(p.display().to_string(), text),
            Err(e) => return Err(Output::fail(EXIT_LOAD, format!("{}: {e}", p.display()))),
        },
    };
    let def: ModuleDef = src
        .parse()
        .map_err(|e| Output::fail(EXIT_LOAD, format!("{}: parse error: {e}", src.location(e.span))))?;
    let module = Module::new(def).map_err(|errs| Output::fail(EXIT_LOAD, wf_report(&src, &errs)))?;
    Ok((src, module))
}

/// Exit status for an evaluation outcome.
pub fn exit_code(r: &VTRes) -> i32 {
    match r {
        VTRes::Done(Ok(_)) | VTRes::Done(Err(ExRes::Return(_))) => EXIT_SUCCESS,
        VTRes::Done(Err(ExRes::Throw(_))) => EXIT_THROW,
        VTRes::Done(Err(_)) => EXIT_ERROR,
        VTRes::Timeout => EXIT_TIMEOUT,
    }
}

pub fn render_result(r: &VTRes) -> String {
    match r {
        VTRes::Done(Ok(v)) => render_value(v),
        VTRes::Done(Err(ExRes::Return(v))) => format!("return {}", render_value(v)),
        VTRes::Done(Err(ExRes::Throw(v))) => format!("throw {}", render_value(v)),
        VTRes::Done(Err(ExRes::Error(e))) => format!("error: {e}"),
        VTRes::Done(Err(x)) => x.kind_name().to_string(),
        VTRes::Timeout => "timeout".to_string(),
    }
}

/// Stable tree encoding of a value.
pub fn value_tree(v: &Value) -> Json {
    match v {
        Value::Basic(crate::value::Basic::Int(i)) => json!({ "int": i.to_string() }),
        Value::Basic(crate::value::Basic::Str(s)) => json!({ "str": &**s }),
        Value::Cons(k, args) => json!({ "cons": &**k, "args": args.iter().map(value_tree).collect::<Vec<_>>() }),
        Value::List(items) => json!({ "list": items.iter().map(value_tree).collect::<Vec<_>>() }),
        Value::Set(items) => json!({ "set": items.as_slice().iter().map(value_tree).collect::<Vec<_>>() }),
        Value::Map(pairs) => json!({
            "map": pairs.as_slice().iter().map(|(k, v)| json!([value_tree(k), value_tree(v)])).collect::<Vec<_>>()
        }),
        Value::Bottom => json!({ "undefined": null }),
    }
}

pub fn result_tree(r: &VTRes) -> Json {
    let kind = r.kind_name();
    match r {
        VTRes::Done(Ok(v)) => json!({ "kind": kind, "value": value_tree(v) }),
        VTRes::Done(Err(ExRes::Return(v) | ExRes::Throw(v))) => {
            json!({ "kind": kind, "value": value_tree(v) })
        }
        VTRes::Done(Err(ExRes::Error(e))) => json!({
            "kind": kind,
            "message": e.to_string(),
            "span": [e.span.start, e.span.end],
        }),
        _ => json!({ "kind": kind }),
    }
}

fn globals_of(module: &Module, store: &Store) -> Vec<(String, Value)> {
    module
        .global_names()
        .filter_map(|g| store.get(g).map(|v| (g.to_string(), v.clone())))
        .collect()
}

fn trace_text(events: &[TraceEvent]) -> String {
    events.iter().map(|e| format!("{e}\n")).collect()
}

pub fn run(args: &RunArgs) -> Output {
    let (src, module) = match load(args.file.as_ref()) {
        Ok(x) => x,
        Err(out) => return out,
    };
    let fuel = args.fuel.unwrap_or(UNBOUNDED);
    let store = match init_module_fuel(&module, fuel) {
        Ok(s) => s,
        Err(e) => {
            let code = match &e {
                InitError::Exceptional { result, .. } => exit_code(&VTRes::Done(Err(result.clone()))),
                InitError::TypeMismatch(_) => EXIT_ERROR,
                InitError::Timeout(_) => EXIT_TIMEOUT,
                InitError::Resource(_) => EXIT_RESOURCE,
            };
            return Output::fail(code, format!("{}: {e}", src.path));
        }
    };
    let mut events: Vec<TraceEvent> = Vec::new();
    let outcome: Result<(VTRes, Store), ResourceExhausted> = if let Some(call) = &args.call {
        let parsed = match parse_expr(call) {
            Ok(e) => e,
            Err(e) => return Output::fail(EXIT_LOAD, format!("--call: parse error at {}: {e}", e.span)),
        };
        let ExprKind::Call(f, arg_exprs) = &parsed.kind else {
            return Output::fail(EXIT_LOAD, "--call: expected a function call such as `f(1, [2])`");
        };
        let Some(fun) = module.function(f) else {
            return Output::fail(EXIT_LOAD, format!("--call: no function named `{f}`"));
        };
        if fun.params.len() != arg_exprs.len() {
            return Output::fail(
                EXIT_LOAD,
                format!(
                    "--call: `{f}` takes {} argument(s), {} given",
                    fun.params.len(),
                    arg_exprs.len()
                ),
            );
        }
        let Some(vals) = arg_exprs.iter().map(expr_to_value).collect::<Option<Vec<_>>>() else {
            return Output::fail(EXIT_LOAD, "--call: arguments must be value literals");
        };
        apply_function_traced(&module, &store, f, vals, fuel, &mut events)
    } else {
        let text = args.eval.as_deref().unwrap_or_default();
        let snippet = SourceFile::new("<eval>", text);
        let e = match parse_expr(text) {
            Ok(e) => e,
            Err(e) => {
                return Output::fail(EXIT_LOAD, format!("{}: parse error: {e}", snippet.location(e.span)))
            }
        };
        let e = match module.resolve_expr(e) {
            Ok(e) => e,
            Err(errs) => return Output::fail(EXIT_LOAD, wf_report(&snippet, &errs)),
        };
        eval_expr_traced(&module, &e, &store, fuel, &mut events)
    };
    let mut out = Output::default();
    if args.trace {
        out.stderr.push_str(&trace_text(&events));
    }
    let (result, final_store) = match outcome {
        Ok(x) => x,
        Err(e) => {
            out.code = EXIT_RESOURCE;
            let _ = writeln!(out.stderr, "{e}");
            return out;
        }
    };
    out.code = exit_code(&result);
    if let VTRes::Done(Err(ExRes::Error(e))) = &result {
        let _ = writeln!(out.stderr, "runtime error at {}: {e}", e.span);
    }
    let globals = globals_of(&module, &final_store);
    match args.format {
        Format::Text => {
            let _ = writeln!(out.stdout, "{}", render_result(&result));
            if args.print_globals {
                for (g, v) in &globals {
                    let _ = writeln!(out.stdout, "{g} = {}", render_value(v));
                }
            }
        }
        Format::Tree => {
            let mut doc = json!({ "version": TREE_FORMAT_VERSION, "result": result_tree(&result) });
            if args.print_globals {
                doc["globals"] = Json::Object(
                    globals.iter().map(|(g, v)| (g.clone(), value_tree(v))).collect(),
                );
            }
            let _ = writeln!(out.stdout, "{doc}");
        }
    }
    out
}
