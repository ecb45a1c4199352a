mod common;

use std::process::Command;

use common::program_path;
use rascal_light::cli::{main_with_args, Output};

fn rlight(args: &[&str]) -> Output {
    main_with_args(std::iter::once("rlight").chain(args.iter().copied()))
}

fn prog(name: &str) -> String {
    program_path(name).display().to_string()
}

#[test]
fn simplify_call() {
    let out = rlight(&["run", &prog("simplifier.rsl"), "--call", "simplify(plus(intlit(0), intlit(5)))"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "intlit(5)\n");
}

#[test]
fn prod_returns_early_on_zero() {
    let out = rlight(&["run", &prog("prod.rsl"), "--call", "prod([1, 2, 0, 3])"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "0\n"));
}

#[test]
fn divergent_traversal_times_out() {
    let out = rlight(&[
        "run",
        &prog("infincrement.rsl"),
        "--call",
        "infincrement(succ(zero()))",
        "--fuel",
        "10000",
    ]);
    assert_eq!(out.code, 4);
    assert_eq!(out.stdout, "timeout\n");
}

#[test]
fn eval_without_a_module() {
    let out = rlight(&["run", "--eval", "1 + 2"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "3\n"));

    let out = rlight(&["run", "--eval", "(1: 2)[3]"]);
    assert_eq!((out.code, out.stdout.as_str()), (2, "throw nokey(3)\n"));

    let out = rlight(&["run", "--eval", "1 / 0"]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("runtime error"), "{}", out.stderr);
}

#[test]
fn load_failures_and_usage_errors() {
    let out = rlight(&["run", "--eval", "x"]);
    assert_eq!(out.code, 5);
    assert!(out.stderr.contains("error"), "{}", out.stderr);

    assert_eq!(rlight(&["run", "--eval", "1 +"]).code, 5);
    assert_eq!(rlight(&["run", "/nonexistent/file.rsl", "--eval", "1"]).code, 5);
    assert_eq!(rlight(&["run", &prog("prod.rsl"), "--call", "nope()"]).code, 5);
    assert_eq!(rlight(&["run"]).code, 64);
    assert_eq!(rlight(&["frobnicate"]).code, 64);
    assert_eq!(rlight(&["--help"]).code, 0);
}

#[test]
fn tree_format_is_versioned_json() {
    let out = rlight(&["run", "--eval", "[1, \"a\"]", "--format", "tree"]);
    assert_eq!(out.code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["result"]["kind"], "success");
    assert_eq!(doc["result"]["value"]["list"][0]["int"], "1");
    assert_eq!(doc["result"]["value"]["list"][1]["str"], "a");
}

#[test]
fn trace_goes_to_stderr() {
    let out = rlight(&["run", "--eval", "switch (1) { case 2 => 3 }", "--trace"]);
    assert_eq!(out.code, 0);
    assert!(out.stderr.contains("E-Switch-Fail"), "{}", out.stderr);
}

#[test]
fn globals_can_be_printed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.rsl");
    std::fs::write(&path, "global int g = 1;\nint bump() = g = g + 1;\n").unwrap();
    let out = rlight(&["run", path.to_str().unwrap(), "--call", "bump()", "--print-globals"]);
    assert_eq!(out.stdout, "2\ng = 2\n");
}

#[test]
fn check_subcommand() {
    for p in ["prod.rsl", "simplifier.rsl", "knapsack.rsl", "fixpoint.rsl", "infincrement.rsl"] {
        let out = rlight(&["check", &prog(p)]);
        assert_eq!((out.code, out.stdout.as_str()), (0, "ok\n"), "{p}: {}", out.stderr);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.rsl");
    std::fs::write(&path, "int f() = y;\n").unwrap();
    let out = rlight(&["check", path.to_str().unwrap()]);
    assert_eq!(out.code, 5);
    assert!(out.stderr.contains("bad.rsl:1:"), "{}", out.stderr);
}

#[test]
fn binary_reads_default_fuel_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_rlight");
    let run = |fuel: &str| {
        Command::new(bin)
            .args(["run", &prog("infincrement.rsl"), "--call", "infincrement(succ(zero()))"])
            .env("RLIGHT_FUEL", fuel)
            .output()
            .unwrap()
    };
    let out = run("500");
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "timeout\n");

    let out = Command::new(bin).args(["run", "--eval", "(1: 2)[3]"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
