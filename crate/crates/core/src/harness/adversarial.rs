//! Hand-written programs aimed at the corners of the evaluator: divergence,
//! deep nesting, huge integers, every runtime error and escaping control.
//! Each program's entry point is `main`.

const NAT: &str = "data Nat = zero() | succ(Nat pred);\n";

const PROGRAMS: &[&str] = &[
    // divergence
    "int down(int n) = down(n + 1);\nvalue main() = down(0);",
    "int a(int n) = b(n);\nint b(int n) = a(n);\nvalue main() = a(1);",
    "value main() = while (true()) 1;",
    "global int g = 0;\nvalue main() = solve (g) g = g + 1;",
    "NAT value main() = top-down visit (succ(zero())) { case succ(m) => succ(succ(m)) };",
    "value main() = innermost visit ([0, 1]) { case 0 => 1; case 1 => 0 };",
    "value main() = outermost visit ([0]) { case int n : m => [n] };",
    "int fib(int n) = if (n < 2) n else fib(n - 1) + fib(n - 2);\nvalue main() = fib(18);",
    // runtime errors
    "value main() = (1: 2)[3];",
    "value main() = 1 / 0;",
    "value main() = 7 % 0;",
    "value main() = -{};",
    "value main() = !1;",
    "value main() = \"a\" - 1;",
    "value main() = if (1) 2 else 3;",
    "value main() = [1] + {2};",
    "int f() = \"s\";\nvalue main() = f();",
    "int f(int x) = x;\nvalue main() = f(\"a\");",
    "value main() = local int x in x end;",
    "global int g = 0;\nvalue main() = g = \"s\";",
    "NAT value main() = bottom-up visit (succ(zero())) { case zero() => \"s\" };",
    "value main() = {for (x <- []) 1};",
    "value main() = [for (x <- [1]) x];",
    "value main() = (for (x <- [1]) x: 1);",
    "value main() = local int x in solve (x) 1 end;",
    "value main() = for (x <- 5) x;",
    "value main() = 1[2];",
    "value main() = 1[2 = 3];",
    "void f() = 1;\nvalue main() = f();",
    // escaping control
    "value f() = break;\nvalue main() = f();",
    "value f() = continue;\nvalue main() = f();",
    "value f() = fail;\nvalue main() = f();",
    "value main() = break;",
    "value main() = fail;",
    "value main() = switch (1) { case 2 => 3 };",
    "value main() = try throw 1 finally throw 2;",
    "value main() = try (try throw 1 catch e => throw [e]) finally 3;",
    "value main() = for (x <- [1, 2, 3]) if (x == 2) break else continue;",
    "int f(list[int] xs) { for (x <- xs) if (x > 1) return x; else 0; return 0; }\nvalue main() = f([1, 2, 3]);",
    "value main() = top-down-break visit ([1, [2, 3]]) { case int n : m => break };",
    // arithmetic and structure at scale
    "value main() = 123456789012345678901234567890 * 987654321098765432109876543210 * 1000000000000000000000;",
    "value main() = -(-(-(-(-9223372036854775808))));",
    "value main() = (1: 1, 1: 2, 1: 3);",
    "value main() = bottom-up visit ((1: 2, 3: 4)) { case int n : m => 0 };",
    "value main() = switch ({1, 2, 3, 4, 5, 6}) { case {*a, *b, *c} => fail; case y => 0 };",
    "value main() = for (/int x : y := [[1, [2, [3]]], (4: 5)]) x;",
];

/// Parseable sources of the corpus, including generated nesting stress
/// tests.
pub fn corpus() -> Vec<String> {
    let mut out: Vec<String> = PROGRAMS
        .iter()
        .map(|p| p.replace("NAT ", NAT))
        .collect();
    let depth = 400;
    out.push(format!("value main() = {}0{};", "[".repeat(depth), "]".repeat(depth)));
    out.push(format!("value main() = {}0{};", "-(".repeat(depth), ")".repeat(depth)));
    out.push(format!(
        "value main() = {}1{};",
        "if (true()) ".repeat(depth),
        " else 0".repeat(depth)
    ));
    out
}
