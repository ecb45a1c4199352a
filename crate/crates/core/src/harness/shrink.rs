//! Greedy shrinking of failing modules.

use crate::ast::{Expr, ExprKind, Generator, ModuleDef};
use crate::validate::validate_module;
use crate::value::Basic;

use super::gen::ENTRY;

/// Repeatedly replaces `def` by the first smaller well-formed candidate on
/// which `failing` still holds, until no candidate does or `max_tries`
/// property evaluations were spent. The result always satisfies `failing`
/// if the input did.
pub fn shrink(def: &ModuleDef, mut failing: impl FnMut(&ModuleDef) -> bool, max_tries: usize) -> ModuleDef {
    let mut best = def.clone();
    let mut tries = 0;
    'outer: loop {
        for cand in candidates(&best) {
            if tries >= max_tries {
                break 'outer;
            }
            if !validate_module(&cand).is_empty() {
                continue;
            }
            tries += 1;
            if failing(&cand) {
                best = cand;
                continue 'outer;
            }
        }
        break;
    }
    best
}

/// Smaller variants of `def`, roughly largest reductions first.
pub fn candidates(def: &ModuleDef) -> Vec<ModuleDef> {
    let mut out = Vec::new();
    for i in 0..def.functions.len() {
        if &*def.functions[i].name != ENTRY {
            let mut d = def.clone();
            d.functions.remove(i);
            out.push(d);
        }
    }
    for i in 0..def.globals.len() {
        let mut d = def.clone();
        d.globals.remove(i);
        out.push(d);
    }
    for i in 0..def.datatypes.len() {
        let mut d = def.clone();
        d.datatypes.remove(i);
        out.push(d);
    }
    for i in 0..def.globals.len() {
        for e in expr_variants(&def.globals[i].init) {
            let mut d = def.clone();
            d.globals[i].init = e;
            out.push(d);
        }
    }
    for i in 0..def.functions.len() {
        for e in expr_variants(&def.functions[i].body) {
            let mut d = def.clone();
            d.functions[i].body = e;
            out.push(d);
        }
    }
    out
}

fn children_mut(e: &mut Expr) -> Vec<&mut Expr> {
    match &mut e.kind {
        ExprKind::Basic(_) | ExprKind::Var(_) | ExprKind::Break | ExprKind::Continue | ExprKind::Fail => vec![],
        ExprKind::Unary(_, a)
        | ExprKind::Return(a)
        | ExprKind::Assign(_, a)
        | ExprKind::Throw(a)
        | ExprKind::Solve(_, a) => vec![&mut **a],
        ExprKind::Binary(a, _, b)
        | ExprKind::Lookup(a, b)
        | ExprKind::While(a, b)
        | ExprKind::TryCatch(a, _, b)
        | ExprKind::TryFinally(a, b) => vec![&mut **a, &mut **b],
        ExprKind::Update(a, b, c) | ExprKind::If(a, b, c) => vec![&mut **a, &mut **b, &mut **c],
        ExprKind::Cons(_, es)
        | ExprKind::Call(_, es)
        | ExprKind::List(es)
        | ExprKind::Set(es)
        | ExprKind::Block(_, es) => es.iter_mut().collect(),
        ExprKind::Map(pairs) => pairs.iter_mut().flat_map(|(k, v)| [k, v]).collect(),
        ExprKind::Switch(s, cs) | ExprKind::Visit(_, s, cs) => {
            let mut v = vec![&mut **s];
            v.extend(cs.iter_mut().map(|c| &mut c.body));
            v
        }
        ExprKind::For(g, body) => {
            let src = match &mut **g {
                Generator::Enumerating(_, src) | Generator::Matching(_, src) => src,
            };
            vec![src, &mut **body]
        }
    }
}

fn count(e: &mut Expr) -> usize {
    1 + children_mut(e).into_iter().map(count).sum::<usize>()
}

/// Applies `f` to the `n`th node in preorder.
fn at_mut(e: &mut Expr, n: &mut usize, f: &mut dyn FnMut(&mut Expr)) -> bool {
    if *n == 0 {
        f(e);
        return true;
    }
    *n -= 1;
    for c in children_mut(e) {
        if at_mut(c, n, f) {
            return true;
        }
    }
    false
}

/// Local simplifications of a single node.
fn root_variants(e: &Expr) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    let mut copy = e.clone();
    for c in children_mut(&mut copy) {
        out.push(c.clone());
    }
    if !matches!(e.kind, ExprKind::Basic(_)) {
        out.push(Expr::synth(ExprKind::Basic(Basic::int(0))));
    }
    let drop_each = |es: &Vec<Expr>, rebuild: &dyn Fn(Vec<Expr>) -> ExprKind, out: &mut Vec<Expr>| {
        for i in 0..es.len() {
            let mut es = es.clone();
            es.remove(i);
            out.push(Expr::synth(rebuild(es)));
        }
    };
    match &e.kind {
        ExprKind::List(es) => drop_each(es, &ExprKind::List, &mut out),
        ExprKind::Set(es) => drop_each(es, &ExprKind::Set, &mut out),
        ExprKind::Block(decls, es) => {
            let decls2 = decls.clone();
            drop_each(es, &move |es| ExprKind::Block(decls2.clone(), es), &mut out);
            for i in 0..decls.len() {
                let mut ds = decls.clone();
                ds.remove(i);
                out.push(Expr::synth(ExprKind::Block(ds, es.clone())));
            }
        }
        ExprKind::Map(pairs) => {
            for i in 0..pairs.len() {
                let mut ps = pairs.clone();
                ps.remove(i);
                out.push(Expr::synth(ExprKind::Map(ps)));
            }
        }
        ExprKind::Switch(s, cs) => {
            for i in 0..cs.len() {
                let mut cs = cs.clone();
                cs.remove(i);
                out.push(Expr::synth(ExprKind::Switch(s.clone(), cs)));
            }
        }
        ExprKind::Visit(st, s, cs) => {
            for i in 0..cs.len() {
                let mut cs = cs.clone();
                cs.remove(i);
                out.push(Expr::synth(ExprKind::Visit(*st, s.clone(), cs)));
            }
        }
        _ => {}
    }
    out
}

/// Every tree obtained by simplifying one node of `e`.
pub fn expr_variants(e: &Expr) -> Vec<Expr> {
    let mut scratch = e.clone();
    let n = count(&mut scratch);
    let mut out = Vec::new();
    for i in 0..n {
        let mut node = None;
        let mut k = i;
        at_mut(&mut scratch, &mut k, &mut |x| node = Some(x.clone()));
        let Some(node) = node else { continue };
        for r in root_variants(&node) {
            let mut copy = e.clone();
            let mut k = i;
            let mut r = Some(r);
            at_mut(&mut copy, &mut k, &mut |x| {
                if let Some(r) = r.take() {
                    *x = r;
                }
            });
            out.push(copy);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::expr_size;
    use crate::parser::parse_module;

    #[test]
    fn shrinking_keeps_the_property_and_reduces_size() {
        let def = parse_module(
            "global int g = 1;\n\
             value main() = local in g = 2 + 3; [1, 2, 3, g]; throw \"boom\" end;",
        )
        .unwrap();
        // The property: the entry contains a `throw` somewhere.
        fn has_throw(e: &Expr) -> bool {
            let mut found = matches!(e.kind, ExprKind::Throw(_));
            crate::ast::for_each_child(e, |c| found = found || has_throw(c));
            found
        }
        let prop = |d: &ModuleDef| d.functions.iter().any(|f| has_throw(&f.body));
        let small = shrink(&def, prop, 10_000);
        assert!(prop(&small));
        let body = &small.functions[0].body;
        assert!(expr_size(body) < expr_size(&def.functions[0].body));
        assert!(small.globals.is_empty());
    }
}
