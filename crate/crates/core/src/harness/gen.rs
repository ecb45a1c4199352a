//! Random generation of well-formed modules, values, patterns and stores.
//!
//! Programs are generated scope-aware so that every module passes
//! validation. A few shape restrictions keep evaluation cheap even though
//! fuel only bounds the height of a derivation:
//!
//! * functions may only call functions declared after them, so there is no
//!   recursion;
//! * `while` and `solve` appear only outside loops and function bodies;
//! * the right-hand side of an assignment reads no variables except those of
//!   type `int`, and `*` always has a literal operand, so no loop can double
//!   the size of a value on each iteration.
//!
//! Half of all programs are generated with a strong bias towards `throw`,
//! `fail`, `break`, `continue` and `return`.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{
    BinOp, Case, DataDef, Expr, ExprKind, FunDef, Generator, GlobalDef, LocalDecl, ModuleDef, Name,
    Param, Pattern, Span, StarPattern, Strategy, UnOp, VarRef,
};
use crate::parser::parse_module;
use crate::typing::{subtype, type_of, DataEnv, Type};
use crate::validate::data_env;
use crate::value::{children, Basic, Store, Value};

/// Name of the zero-argument function every generated module uses as its
/// entry point.
pub const ENTRY: &str = "main";

const POOL: &str = "data Nat = zero() | succ(Nat pred);\n\
                    data Tree = leaf(int val) | node(Tree left, Tree right);\n\
                    data Box = box(value content) | pair(value fst, value snd);";

/// Datatypes available to generated programs. Every datatype in a pool must
/// have a constructor without fields of its own type.
pub fn default_datatypes() -> Vec<DataDef> {
    parse_module(POOL).expect("datatype pool parses").datatypes
}

#[derive(Clone, Debug)]
pub struct GenBudget {
    pub max_depth: usize,
    pub max_coll: usize,
    pub datatypes: Vec<DataDef>,
    pub seed: u64,
}

impl Default for GenBudget {
    fn default() -> Self {
        GenBudget {
            max_depth: 5,
            max_coll: 4,
            datatypes: default_datatypes(),
            seed: 0,
        }
    }
}

/// Which constructs a generated program may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subset {
    All,
    /// No calls, no `while` or `solve`, and only bottom-up traversals.
    Finite,
}

/// Generates one module from `b.seed`.
pub fn gen_program(b: &GenBudget, subset: Subset) -> ModuleDef {
    Gen::new(b, b.seed, 0).program(subset)
}

/// A module together with a store to run its entry point in.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub module: ModuleDef,
    pub store: Store,
}

#[derive(Clone, Debug)]
struct VarInfo {
    name: Name,
    ty: Type,
    assignable: bool,
}

#[derive(Clone, Debug)]
struct FunSig {
    name: Name,
    params: Vec<Type>,
    ret: Type,
}

#[derive(Clone, Debug, Default)]
struct Ctx {
    vars: Vec<VarInfo>,
    funs: Vec<FunSig>,
    finite: bool,
    heavy_ok: bool,
    in_rhs: bool,
    loops: usize,
}

impl Ctx {
    fn with_var(&self, name: Name, ty: Type, assignable: bool) -> Ctx {
        let mut c = self.clone();
        c.vars.push(VarInfo {
            name,
            ty,
            assignable,
        });
        c
    }

    fn with_bound(&self, names: &[Name]) -> Ctx {
        let mut c = self.clone();
        for n in names {
            c.vars.push(VarInfo {
                name: n.clone(),
                ty: Type::Value,
                assignable: false,
            });
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum K {
    Lit,
    Var,
    Unary,
    Binary,
    Cons,
    Coll,
    Lookup,
    Update,
    Call,
    Return,
    Assign,
    If,
    Switch,
    Visit,
    Break,
    Continue,
    Fail,
    Block,
    For,
    While,
    Solve,
    Throw,
    TryCatch,
    TryFinally,
}

fn mk(kind: ExprKind) -> Expr {
    Expr::synth(kind)
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn var(name: &Name) -> Expr {
    mk(ExprKind::Var(VarRef::new(name)))
}

fn int(i: i64) -> Expr {
    mk(ExprKind::Basic(Basic::int(i)))
}

fn bool_type() -> Type {
    Type::adt("Bool")
}

/// The literal expression denoting `v`. Constructor applications are
/// produced as calls, the way the parser reads them.
pub fn value_expr(v: &Value) -> Expr {
    mk(match v {
        Value::Basic(b) => ExprKind::Basic(b.clone()),
        Value::Cons(k, args) => ExprKind::Call(k.clone(), args.iter().map(value_expr).collect()),
        Value::List(items) => ExprKind::List(items.iter().map(value_expr).collect()),
        Value::Set(items) => ExprKind::Set(items.as_slice().iter().map(value_expr).collect()),
        Value::Map(pairs) => ExprKind::Map(
            pairs
                .as_slice()
                .iter()
                .map(|(k, v)| (value_expr(k), value_expr(v)))
                .collect(),
        ),
        // No literal denotes the undefined value; an empty `for` evaluates to it.
        Value::Bottom => ExprKind::For(
            Box::new(Generator::Enumerating(Arc::from("_u"), mk(ExprKind::List(vec![])))),
            bx(int(0)),
        ),
    })
}

/// Seeded generator state.
pub struct Gen<'b> {
    pub rng: ChaCha8Rng,
    budget: &'b GenBudget,
    data: DataEnv,
    adts: Vec<Name>,
    next: usize,
    exc_bias: bool,
    /// When set, pattern variables are drawn from this pool instead of
    /// being fresh, which produces non-linear patterns.
    name_pool: Option<&'static [&'static str]>,
}

impl<'b> Gen<'b> {
    /// Generator for case `index` of a run seeded with `seed`. Each case uses
    /// its own ChaCha stream, so cases can be generated in any order.
    pub fn new(budget: &'b GenBudget, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let def = ModuleDef {
            datatypes: budget.datatypes.clone(),
            ..ModuleDef::default()
        };
        let data = data_env(&def);
        Gen {
            rng,
            budget,
            data,
            adts: budget.datatypes.iter().map(|d| d.name.clone()).collect(),
            next: 0,
            exc_bias: false,
            name_pool: None,
        }
    }

    pub fn data(&self) -> &DataEnv {
        &self.data
    }

    fn fresh(&mut self, prefix: &str) -> Name {
        if let Some(pool) = self.name_pool {
            return Arc::from(*pool.choose(&mut self.rng).expect("non-empty pool"));
        }
        self.next += 1;
        Arc::from(format!("{prefix}{}", self.next))
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<T: Copy>(&mut self, options: &[(T, u32)]) -> T {
        let total: u32 = options.iter().map(|(_, w)| w).sum();
        let mut n = self.rng.gen_range(0..total);
        for (t, w) in options {
            if n < *w {
                return *t;
            }
            n -= w;
        }
        unreachable!("weights sum to total")
    }

    // ---- types and values ----

    pub fn gen_type(&mut self, depth: usize) -> Type {
        if depth > 0 && self.chance(0.3) {
            return match self.rng.gen_range(0..3) {
                0 => Type::list(self.gen_type(depth - 1)),
                1 => Type::set(self.gen_type(depth - 1)),
                _ => Type::map(self.gen_type(depth - 1), self.gen_type(depth - 1)),
            };
        }
        match self.rng.gen_range(0..8) {
            0..=2 => Type::Int,
            3 => Type::Str,
            4 => Type::Value,
            5 => bool_type(),
            _ => {
                let n = self.adts.choose(&mut self.rng).cloned();
                n.map(Type::Adt).unwrap_or(Type::Int)
            }
        }
    }

    fn gen_int(&mut self) -> BigInt {
        if self.chance(0.08) {
            let big: BigInt = BigInt::from(10u8).pow(self.rng.gen_range(18..40));
            if self.chance(0.5) {
                -big
            } else {
                big
            }
        } else {
            BigInt::from(self.rng.gen_range(-3i64..=9))
        }
    }

    fn gen_str(&mut self) -> Value {
        let s = ["", "a", "b", "ab", "x\"y", "tab\t"].choose(&mut self.rng).copied();
        Value::str(s.unwrap_or(""))
    }

    /// A value of type `t` with nesting at most `depth` below the root.
    pub fn value_of(&mut self, t: &Type, depth: usize) -> Value {
        match t {
            Type::Int | Type::Void => Value::int(self.gen_int()),
            Type::Str => self.gen_str(),
            Type::Value => {
                let t = if depth == 0 {
                    if self.chance(0.7) {
                        Type::Int
                    } else {
                        Type::Str
                    }
                } else {
                    self.gen_type(depth.min(2))
                };
                self.value_of(&t, depth)
            }
            Type::Adt(name) => self.adt_value(name, depth),
            Type::List(e) => {
                let n = self.coll_len(depth);
                Value::list((0..n).map(|_| self.value_of(e, depth.saturating_sub(1))).collect::<Vec<_>>())
            }
            Type::Set(e) => {
                let n = self.coll_len(depth);
                Value::set((0..n).map(|_| self.value_of(e, depth.saturating_sub(1))).collect::<Vec<_>>())
            }
            Type::Map(k, v) => {
                let n = self.coll_len(depth);
                let d = depth.saturating_sub(1);
                Value::map((0..n).map(|_| (self.value_of(k, d), self.value_of(v, d))).collect::<Vec<_>>())
            }
        }
    }

    fn coll_len(&mut self, depth: usize) -> usize {
        if depth == 0 {
            0
        } else {
            self.rng.gen_range(0..=self.budget.max_coll)
        }
    }

    fn adt_value(&mut self, name: &Name, depth: usize) -> Value {
        let conses: Vec<Name> = self.data.constructors_of(name).to_vec();
        if conses.is_empty() {
            return Value::int(0);
        }
        let recursive = |me: &Self, k: &Name| {
            me.data
                .constructor(k)
                .map(|s| s.field_types().filter(|t| matches!(t, Type::Adt(n) if n == name)).count())
                .unwrap_or(0)
        };
        let k = if depth == 0 {
            let least = conses.iter().map(|k| recursive(self, k)).min().unwrap_or(0);
            let base: Vec<&Name> = conses.iter().filter(|k| recursive(self, k) == least).collect();
            (*base.choose(&mut self.rng).expect("some constructor")).clone()
        } else {
            conses.choose(&mut self.rng).expect("some constructor").clone()
        };
        let fields: Vec<Type> = self
            .data
            .constructor(&k)
            .map(|s| s.field_types().cloned().collect())
            .unwrap_or_default();
        let args: Vec<Value> = fields
            .iter()
            .map(|t| self.value_of(t, depth.saturating_sub(1)))
            .collect();
        Value::Cons(k, args.into())
    }

    /// Any value of a random type.
    pub fn any_value(&mut self, depth: usize) -> Value {
        let t = self.gen_type(depth.min(2));
        self.value_of(&t, depth)
    }

    /// A store for the globals of `def`: mostly well typed, sometimes with a
    /// value of the wrong type or no value at all.
    pub fn store_for(&mut self, def: &ModuleDef) -> Store {
        let mut store = Store::new();
        for g in &def.globals {
            match self.rng.gen_range(0..20) {
                0..=14 => {
                    let v = self.value_of(&g.ty, 2);
                    store.insert(g.name.clone(), v);
                }
                15..=16 => {
                    let v = self.any_value(2);
                    store.insert(g.name.clone(), v);
                }
                _ => {}
            }
        }
        store
    }

    // ---- programs ----

    pub fn program(&mut self, subset: Subset) -> ModuleDef {
        let finite = subset == Subset::Finite;
        self.exc_bias = self.chance(0.5);
        let n_globals = self.rng.gen_range(0..=3);
        let n_funs = self.rng.gen_range(0..=if finite { 2 } else { 3 });

        let globals: Vec<(Name, Type)> = (0..n_globals)
            .map(|_| {
                let name = self.fresh("g");
                (name, self.gen_type(2))
            })
            .collect();
        let funs: Vec<FunSig> = (0..n_funs)
            .map(|_| {
                let name = self.fresh("f");
                let params = (0..self.rng.gen_range(0..=2)).map(|_| self.gen_type(1)).collect();
                let ret = if self.chance(0.2) {
                    Type::Value
                } else if self.chance(0.03) {
                    Type::Void
                } else {
                    self.gen_type(1)
                };
                FunSig { name, params, ret }
            })
            .collect();

        let base = Ctx {
            vars: globals
                .iter()
                .map(|(n, t)| VarInfo {
                    name: n.clone(),
                    ty: t.clone(),
                    assignable: true,
                })
                .collect(),
            funs: if finite { Vec::new() } else { funs.clone() },
            finite,
            heavy_ok: true,
            in_rhs: false,
            loops: 0,
        };
        let depth = self.budget.max_depth;

        let mut def = ModuleDef {
            datatypes: self.budget.datatypes.clone(),
            ..ModuleDef::default()
        };
        for (i, (name, ty)) in globals.iter().enumerate() {
            let init = if self.chance(0.8) {
                let v = self.value_of(ty, 2);
                value_expr(&v)
            } else {
                let mut ctx = base.clone();
                ctx.vars.truncate(i);
                self.expr(&ctx, ty, depth.min(2))
            };
            def.globals.push(GlobalDef {
                name: name.clone(),
                ty: ty.clone(),
                init,
                span: Span::default(),
            });
        }
        for (i, f) in funs.iter().enumerate() {
            let mut params = Vec::new();
            let mut ctx = base.clone();
            ctx.heavy_ok = false;
            ctx.funs = if finite { Vec::new() } else { funs[i + 1..].to_vec() };
            for t in &f.params {
                let name = self.fresh("p");
                params.push(Param {
                    ty: t.clone(),
                    name: name.clone(),
                });
                ctx = ctx.with_var(name, t.clone(), true);
            }
            let body = self.expr(&ctx, &f.ret, depth);
            def.functions.push(FunDef {
                name: f.name.clone(),
                ret: f.ret.clone(),
                params,
                body,
                span: Span::default(),
            });
        }
        let body = self.expr(&base, &Type::Value, depth);
        def.functions.push(FunDef {
            name: Arc::from(ENTRY),
            ret: Type::Value,
            params: Vec::new(),
            body,
            span: Span::default(),
        });
        def
    }

    /// A module with a generated store for its globals.
    pub fn scenario(&mut self, subset: Subset) -> Scenario {
        let module = self.program(subset);
        let store = self.store_for(&module);
        Scenario { module, store }
    }

    /// A `(cases, value, store)` triple, packaged as a module whose entry is
    /// `switch (v) { cases }`. The cases are biased towards mutating globals
    /// and then failing.
    pub fn cases_triple(&mut self) -> Scenario {
        let mut def = self.program(Subset::All);
        def.functions.retain(|f| &*f.name != ENTRY);
        self.exc_bias = true;
        let ctx = Ctx {
            vars: def
                .globals
                .iter()
                .map(|g| VarInfo {
                    name: g.name.clone(),
                    ty: g.ty.clone(),
                    assignable: true,
                })
                .collect(),
            funs: Vec::new(),
            finite: false,
            heavy_ok: false,
            in_rhs: false,
            loops: 0,
        };
        let t = self.gen_type(2);
        let v = self.value_of(&t, 3);
        let n = self.rng.gen_range(1..=4);
        let cases = (0..n)
            .map(|_| {
                let mut binders = Vec::new();
                let sample = if self.chance(0.7) { v.clone() } else { self.value_of(&t, 2) };
                let pattern = self.pattern_for(&ctx, &sample, 3, &mut binders);
                let inner = ctx.with_bound(&binders);
                let body = if self.chance(0.6) {
                    self.mutate_then_fail(&inner)
                } else {
                    self.expr(&inner, &Type::Value, 2)
                };
                Case { pattern, body }
            })
            .collect();
        let store = self.store_for(&def);
        def.functions.push(FunDef {
            name: Arc::from(ENTRY),
            ret: Type::Value,
            params: Vec::new(),
            body: mk(ExprKind::Switch(bx(value_expr(&v)), cases)),
            span: Span::default(),
        });
        Scenario { module: def, store }
    }

    fn mutate_then_fail(&mut self, ctx: &Ctx) -> Expr {
        let targets: Vec<VarInfo> = ctx.vars.iter().filter(|v| v.assignable).cloned().collect();
        let mut es = Vec::new();
        for _ in 0..self.rng.gen_range(1..=3) {
            match targets.choose(&mut self.rng) {
                Some(x) => {
                    let ty = x.ty.clone();
                    let mut rhs_ctx = ctx.clone();
                    rhs_ctx.in_rhs = true;
                    let rhs = self.expr(&rhs_ctx, &ty, 1);
                    es.push(mk(ExprKind::Assign(VarRef::new(&x.name), bx(rhs))));
                }
                None => es.push(self.expr(ctx, &Type::Value, 1)),
            }
        }
        es.push(mk(ExprKind::Fail));
        if self.chance(0.3) {
            // Fail from inside a nested construct rather than at the end.
            let last = es.pop().expect("fail pushed");
            let cond = self.expr(ctx, &bool_type(), 1);
            es.push(mk(ExprKind::If(bx(cond), bx(last), bx(mk(ExprKind::Fail)))));
        }
        mk(ExprKind::Block(Vec::new(), es))
    }

    // ---- expressions ----

    fn expr(&mut self, ctx: &Ctx, ty: &Type, depth: usize) -> Expr {
        let exc = if self.exc_bias { 6 } else { 1 };
        // Bodies start with a compound expression so that runs do some work.
        let root = depth > 0 && depth >= self.budget.max_depth;
        let mut ks: Vec<(K, u32)> = if root {
            Vec::new()
        } else {
            vec![
                (K::Lit, 8),
                (K::Var, 8),
                (K::Break, exc),
                (K::Continue, exc),
                (K::Fail, exc * 2),
            ]
        };
        if depth > 0 {
            ks.extend([
                (K::Unary, 1),
                (K::Binary, 3),
                (K::Cons, 2),
                (K::Coll, 2),
                (K::Lookup, 1 + exc / 2),
                (K::Update, 1),
                (K::Assign, 3),
                (K::If, 2),
                (K::Switch, 3),
                (K::Visit, 2),
                (K::Block, 2),
                (K::For, 2),
                (K::Throw, exc),
                (K::Return, exc),
                (K::TryCatch, 2),
                (K::TryFinally, 1),
            ]);
            if !ctx.finite {
                ks.push((K::Call, 3));
                if ctx.heavy_ok {
                    ks.push((K::While, 1));
                    ks.push((K::Solve, 1));
                }
            }
        }
        let k = self.pick(&ks);
        let d = depth.saturating_sub(1);
        match k {
            K::Lit => self.lit(ty, depth),
            K::Var => self.read_var(ctx, ty).unwrap_or_else(|| self.lit(ty, depth)),
            K::Break => mk(ExprKind::Break),
            K::Continue => mk(ExprKind::Continue),
            K::Fail => mk(ExprKind::Fail),
            K::Unary => self.unary(ctx, ty, d),
            K::Binary => self.binary(ctx, ty, d),
            K::Cons => self.cons(ctx, ty, d),
            K::Coll => self.coll(ctx, ty, d),
            K::Lookup => {
                let kt = self.gen_type(1);
                let vt = if *ty == Type::Value { self.gen_type(1) } else { ty.clone() };
                let m = self.expr(ctx, &Type::map(kt.clone(), vt), d);
                let key = self.expr(ctx, &kt, d);
                mk(ExprKind::Lookup(bx(m), bx(key)))
            }
            K::Update => {
                let mt = match ty {
                    Type::Map(..) => ty.clone(),
                    _ => Type::map(self.gen_type(1), self.gen_type(1)),
                };
                let Type::Map(kt, vt) = &mt else { unreachable!() };
                let m = self.expr(ctx, &mt, d);
                let key = self.expr(ctx, kt, d);
                let val = self.expr(ctx, vt, d);
                mk(ExprKind::Update(bx(m), bx(key), bx(val)))
            }
            K::Call => self.call(ctx, ty, d),
            K::Return => {
                let t = if self.chance(0.7) { ty.clone() } else { self.gen_type(1) };
                let e = self.expr(ctx, &t, d);
                mk(ExprKind::Return(bx(e)))
            }
            K::Assign => self.assign(ctx, ty, d),
            K::If => {
                let c = self.expr(ctx, &bool_type(), d);
                let a = self.expr(ctx, ty, d);
                let b = self.expr(ctx, ty, d);
                mk(ExprKind::If(bx(c), bx(a), bx(b)))
            }
            K::Switch => {
                let t = if self.chance(0.5) { ty.clone() } else { self.gen_type(1) };
                let scrut = self.expr(ctx, &t, d);
                let cases = self.cases(ctx, &t, ty, d);
                mk(ExprKind::Switch(bx(scrut), cases))
            }
            K::Visit => self.visit(ctx, ty, d),
            K::Block => self.block(ctx, ty, d),
            K::For => self.for_loop(ctx, ty, d),
            K::While => self.while_loop(ctx, d),
            K::Solve => {
                let mut names: Vec<Name> = ctx.vars.iter().map(|v| v.name.clone()).collect();
                names.shuffle(&mut self.rng);
                names.truncate(self.rng.gen_range(1..=2));
                if names.is_empty() {
                    return self.lit(ty, depth);
                }
                let mut inner = ctx.clone();
                inner.heavy_ok = false;
                let body = self.expr(&inner, ty, d);
                mk(ExprKind::Solve(names.iter().map(|n| VarRef::new(n)).collect(), bx(body)))
            }
            K::Throw => {
                let t = self.gen_type(1);
                let e = self.expr(ctx, &t, d);
                mk(ExprKind::Throw(bx(e)))
            }
            K::TryCatch => {
                let a = self.expr(ctx, ty, d);
                let x = self.fresh("e");
                let inner = ctx.with_var(x.clone(), Type::Value, false);
                let h = self.expr(&inner, ty, d);
                mk(ExprKind::TryCatch(bx(a), x, bx(h)))
            }
            K::TryFinally => {
                let a = self.expr(ctx, ty, d);
                let t = self.gen_type(1);
                let b = self.expr(ctx, &t, d);
                mk(ExprKind::TryFinally(bx(a), bx(b)))
            }
        }
    }

    fn lit(&mut self, ty: &Type, depth: usize) -> Expr {
        let v = self.value_of(ty, depth.min(2));
        value_expr(&v)
    }

    fn read_var(&mut self, ctx: &Ctx, ty: &Type) -> Option<Expr> {
        let loose = self.chance(0.2);
        let cands: Vec<&VarInfo> = ctx
            .vars
            .iter()
            .filter(|v| !ctx.in_rhs || v.ty == Type::Int)
            .filter(|v| subtype(&v.ty, ty) || *ty == Type::Value || (loose && v.ty == Type::Value))
            .collect();
        cands.choose(&mut self.rng).map(|v| var(&v.name))
    }

    fn unary(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        let (op, t) = match ty {
            Type::Int => (UnOp::Neg, Type::Int),
            Type::Adt(n) if &**n == "Bool" => (UnOp::Not, bool_type()),
            _ => {
                let op = if self.chance(0.5) { UnOp::Neg } else { UnOp::Not };
                (op, self.gen_type(1))
            }
        };
        let a = self.expr(ctx, &t, d);
        mk(ExprKind::Unary(op, bx(a)))
    }

    fn binary(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        let is_bool = matches!(ty, Type::Adt(n) if &**n == "Bool");
        let (op, lt, rt) = match ty {
            Type::Int => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod]
                    .choose(&mut self.rng)
                    .expect("non-empty");
                (op, Type::Int, Type::Int)
            }
            _ if is_bool => match self.rng.gen_range(0..3) {
                0 => {
                    let op = *[BinOp::And, BinOp::Or].choose(&mut self.rng).expect("non-empty");
                    (op, bool_type(), bool_type())
                }
                1 => {
                    let t = self.gen_type(1);
                    let coll = match self.rng.gen_range(0..3) {
                        0 => Type::list(t.clone()),
                        1 => Type::set(t.clone()),
                        _ => Type::map(t.clone(), Type::Int),
                    };
                    (BinOp::In, t, coll)
                }
                _ => {
                    let op = *[BinOp::Eq, BinOp::Neq, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge]
                        .choose(&mut self.rng)
                        .expect("non-empty");
                    let t = self.gen_type(1);
                    (op, t.clone(), t)
                }
            },
            Type::Str | Type::List(_) | Type::Set(_) | Type::Map(..) => (BinOp::Add, ty.clone(), ty.clone()),
            _ => {
                let op = *BinOp::ALL.choose(&mut self.rng).expect("non-empty");
                (op, self.gen_type(1), self.gen_type(1))
            }
        };
        if op == BinOp::Mul {
            // One literal operand keeps repeated multiplication from squaring.
            let a = self.expr(ctx, &lt, d);
            let lit = value_expr(&Value::int(self.gen_int()));
            return if self.chance(0.5) {
                mk(ExprKind::Binary(bx(a), op, bx(lit)))
            } else {
                mk(ExprKind::Binary(bx(lit), op, bx(a)))
            };
        }
        let a = self.expr(ctx, &lt, d);
        let b = self.expr(ctx, &rt, d);
        mk(ExprKind::Binary(bx(a), op, bx(b)))
    }

    fn cons(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        let datatype = match ty {
            Type::Adt(n) => n.clone(),
            Type::Value => match self.adts.choose(&mut self.rng) {
                Some(n) => n.clone(),
                None => return self.lit(ty, d),
            },
            _ => return self.lit(ty, d),
        };
        let conses = self.data.constructors_of(&datatype).to_vec();
        let Some(k) = conses.choose(&mut self.rng).cloned() else {
            return self.lit(ty, d);
        };
        let fields: Vec<Type> = self
            .data
            .constructor(&k)
            .map(|s| s.field_types().cloned().collect())
            .unwrap_or_default();
        let args = fields.iter().map(|t| self.expr(ctx, t, d)).collect();
        mk(ExprKind::Call(k, args))
    }

    fn coll(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        let t = match ty {
            Type::Value => match self.rng.gen_range(0..3) {
                0 => Type::list(self.gen_type(1)),
                1 => Type::set(self.gen_type(1)),
                _ => Type::map(self.gen_type(1), self.gen_type(1)),
            },
            _ => ty.clone(),
        };
        let n = self.rng.gen_range(0..=self.budget.max_coll.min(3));
        match &t {
            Type::List(e) => mk(ExprKind::List((0..n).map(|_| self.expr(ctx, e, d)).collect())),
            Type::Set(e) => mk(ExprKind::Set((0..n).map(|_| self.expr(ctx, e, d)).collect())),
            Type::Map(k, v) => mk(ExprKind::Map(
                (0..n).map(|_| (self.expr(ctx, k, d), self.expr(ctx, v, d))).collect(),
            )),
            _ => self.lit(ty, d),
        }
    }

    fn call(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        let cands: Vec<FunSig> = ctx
            .funs
            .iter()
            .filter(|f| *ty == Type::Value || subtype(&f.ret, ty))
            .cloned()
            .collect();
        let Some(f) = cands.choose(&mut self.rng).cloned() else {
            return self.lit(ty, d);
        };
        let args = f
            .params
            .iter()
            .map(|t| {
                let t = if self.exc_bias && self.chance(0.15) { self.gen_type(1) } else { t.clone() };
                self.expr(ctx, &t, d)
            })
            .collect();
        mk(ExprKind::Call(f.name.clone(), args))
    }

    fn assign(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        let cands: Vec<VarInfo> = ctx
            .vars
            .iter()
            .filter(|v| v.assignable && (*ty == Type::Value || subtype(&v.ty, ty)))
            .cloned()
            .collect();
        let Some(x) = cands.choose(&mut self.rng).cloned() else {
            return self.lit(ty, d);
        };
        let mut rhs_ctx = ctx.clone();
        rhs_ctx.in_rhs = true;
        let t = if self.exc_bias && self.chance(0.2) { self.gen_type(1) } else { x.ty.clone() };
        let rhs = self.expr(&rhs_ctx, &t, d);
        mk(ExprKind::Assign(VarRef::new(&x.name), bx(rhs)))
    }

    fn cases(&mut self, ctx: &Ctx, scrut: &Type, body: &Type, d: usize) -> Vec<Case> {
        let n = self.rng.gen_range(0..=3);
        (0..n)
            .map(|_| {
                let sample = self.value_of(scrut, 2);
                let mut binders = Vec::new();
                let pattern = self.pattern_for(ctx, &sample, 2, &mut binders);
                let inner = ctx.with_bound(&binders);
                let body = self.expr(&inner, body, d);
                Case { pattern, body }
            })
            .collect()
    }

    fn visit(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        let st = if ctx.finite {
            *[Strategy::BottomUp, Strategy::BottomUpBreak]
                .choose(&mut self.rng)
                .expect("non-empty")
        } else {
            *Strategy::ALL.choose(&mut self.rng).expect("non-empty")
        };
        let scrut_ty = match ty {
            Type::Int | Type::Str | Type::Void => self.gen_type(2),
            _ => ty.clone(),
        };
        let scrut = self.expr(ctx, &scrut_ty, d);
        let mut inner = ctx.clone();
        if matches!(st, Strategy::Innermost | Strategy::Outermost | Strategy::TopDown | Strategy::TopDownBreak) {
            inner.heavy_ok = false;
        }
        // Cases target some component type of the scrutinee.
        let sample = self.value_of(&scrut_ty, 2);
        let mut parts = vec![sample.clone()];
        let mut i = 0;
        while i < parts.len() && parts.len() < 32 {
            parts.extend(children(&parts[i]));
            i += 1;
        }
        let n = self.rng.gen_range(1..=2);
        let cases = (0..n)
            .map(|_| {
                let target = parts.choose(&mut self.rng).cloned().unwrap_or(Value::int(0));
                let mut binders = Vec::new();
                let pattern = self.pattern_for(&inner, &target, 2, &mut binders);
                let body_ctx = inner.with_bound(&binders);
                let body_ty = match type_of(&target, &self.data) {
                    Ok(t) if self.chance(0.7) => t,
                    _ => self.gen_type(1),
                };
                let body = self.expr(&body_ctx, &body_ty, d);
                Case { pattern, body }
            })
            .collect();
        mk(ExprKind::Visit(st, bx(scrut), cases))
    }

    fn block(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        let mut inner = ctx.clone();
        let mut decls = Vec::new();
        for _ in 0..self.rng.gen_range(0..=2) {
            let name = self.fresh("l");
            let t = self.gen_type(1);
            decls.push(LocalDecl {
                ty: t.clone(),
                name: name.clone(),
            });
            inner = inner.with_var(name, t, true);
        }
        let mut es = Vec::new();
        for (i, decl) in decls.iter().enumerate() {
            if self.chance(0.8) {
                let mut rhs_ctx = inner.clone();
                rhs_ctx.in_rhs = true;
                // Later locals are still unset here; reading them is an error path.
                rhs_ctx.vars.retain(|v| !decls[i..].iter().any(|d| d.name == v.name) || self.exc_bias);
                let rhs = self.expr(&rhs_ctx, &decl.ty, d);
                es.push(mk(ExprKind::Assign(VarRef::new(&decl.name), bx(rhs))));
            }
        }
        for _ in 0..self.rng.gen_range(0..=1) {
            let t = self.gen_type(1);
            es.push(self.expr(&inner, &t, d));
        }
        es.push(self.expr(&inner, ty, d));
        mk(ExprKind::Block(decls, es))
    }

    fn for_loop(&mut self, ctx: &Ctx, ty: &Type, d: usize) -> Expr {
        if ctx.loops >= 2 {
            return self.lit(ty, d);
        }
        let mut inner = ctx.clone();
        inner.loops += 1;
        inner.heavy_ok = false;
        let elem = self.gen_type(1);
        let g = if self.chance(0.6) {
            let src_ty = match self.rng.gen_range(0..5) {
                0..=2 => Type::list(elem.clone()),
                3 => Type::set(elem.clone()),
                _ => Type::map(elem.clone(), self.gen_type(1)),
            };
            let src = self.expr(ctx, &src_ty, d);
            let x = self.fresh("b");
            inner = inner.with_var(x.clone(), elem, false);
            Generator::Enumerating(x, src)
        } else {
            let src = self.expr(ctx, &elem, d);
            let sample = self.value_of(&elem, 2);
            let mut binders = Vec::new();
            let p = self.pattern_for(ctx, &sample, 2, &mut binders);
            inner = inner.with_bound(&binders);
            Generator::Matching(p, src)
        };
        let t = self.gen_type(1);
        let body = self.expr(&inner, &t, d);
        mk(ExprKind::For(Box::new(g), bx(body)))
    }

    fn while_loop(&mut self, ctx: &Ctx, d: usize) -> Expr {
        let mut inner = ctx.clone();
        inner.heavy_ok = false;
        inner.loops += 1;
        let counters: Vec<Name> = ctx
            .vars
            .iter()
            .filter(|v| v.assignable && v.ty == Type::Int)
            .map(|v| v.name.clone())
            .collect();
        if let (Some(x), true) = (counters.choose(&mut self.rng).cloned(), self.chance(0.6)) {
            // A counting loop that usually terminates.
            let bound = int(self.rng.gen_range(-2..=6));
            let cond = mk(ExprKind::Binary(bx(var(&x)), BinOp::Lt, bx(bound)));
            let step = mk(ExprKind::Assign(
                VarRef::new(&x),
                bx(mk(ExprKind::Binary(bx(var(&x)), BinOp::Add, bx(int(1))))),
            ));
            let t = self.gen_type(1);
            let other = self.expr(&inner, &t, d);
            return mk(ExprKind::While(bx(cond), bx(mk(ExprKind::Block(Vec::new(), vec![step, other])))));
        }
        let cond = self.expr(&inner, &bool_type(), d);
        let t = self.gen_type(1);
        let body = self.expr(&inner, &t, d);
        mk(ExprKind::While(bx(cond), bx(body)))
    }

    // ---- patterns ----

    fn visible_names(ctx: &Ctx, frame: &[Name]) -> Vec<Name> {
        ctx.vars.iter().map(|v| v.name.clone()).chain(frame.iter().cloned()).collect()
    }

    /// A pattern shaped after `v`, so that it often (not always) matches.
    /// Newly bound names are appended to `frame`.
    fn pattern_for(&mut self, ctx: &Ctx, v: &Value, depth: usize, frame: &mut Vec<Name>) -> Pattern {
        #[derive(Clone, Copy)]
        enum P {
            Fresh,
            Reuse,
            Shape,
            Typed,
            Not,
            Deep,
            Other,
        }
        let mut opts = vec![(P::Fresh, 3), (P::Shape, 5)];
        if !ctx.vars.is_empty() || !frame.is_empty() {
            opts.push((P::Reuse, 1));
        }
        if depth > 0 {
            opts.extend([(P::Typed, 1), (P::Not, 1), (P::Other, 1)]);
            if !children(v).is_empty() {
                opts.push((P::Deep, 1));
            }
        }
        match self.pick(&opts) {
            P::Fresh => self.bind_var(frame),
            P::Reuse => {
                let names = Self::visible_names(ctx, frame);
                let n = names.choose(&mut self.rng).expect("checked non-empty");
                Pattern::Var(VarRef::new(n))
            }
            P::Typed => {
                let t = match type_of(v, &self.data) {
                    Ok(t) if self.chance(0.7) => t,
                    _ => self.gen_type(1),
                };
                let x = self.typed_label_name(ctx, frame);
                let inner = self.pattern_for(ctx, v, depth - 1, frame);
                Pattern::TypedLabelled(t, x, Box::new(inner))
            }
            P::Not => {
                let other = if self.chance(0.5) { v.clone() } else { self.any_value(1) };
                let mut scratch = frame.clone();
                let inner = self.pattern_for(ctx, &other, depth - 1, &mut scratch);
                Pattern::Negation(Box::new(inner))
            }
            P::Deep => {
                let mut parts = Vec::new();
                let mut stack = children(v);
                while let Some(c) = stack.pop() {
                    stack.extend(children(&c));
                    parts.push(c);
                }
                let target = parts.choose(&mut self.rng).cloned().unwrap_or_else(|| v.clone());
                let inner = self.pattern_for(ctx, &target, depth - 1, frame);
                Pattern::Descendant(Box::new(inner))
            }
            P::Other => {
                let other = self.any_value(2);
                self.pattern_for(ctx, &other, depth - 1, frame)
            }
            P::Shape => self.shape(ctx, v, depth, frame),
        }
    }

    fn bind_var(&mut self, frame: &mut Vec<Name>) -> Pattern {
        let x = self.fresh("v");
        if !frame.contains(&x) {
            frame.push(x.clone());
        }
        Pattern::Var(VarRef::new(&x))
    }

    /// Typed labels must introduce a name not visible yet.
    fn typed_label_name(&mut self, ctx: &Ctx, frame: &mut Vec<Name>) -> Name {
        let x = self.fresh("t");
        if self.name_pool.is_none() {
            debug_assert!(!ctx.vars.iter().any(|v| v.name == x));
            frame.push(x.clone());
        }
        x
    }

    fn shape(&mut self, ctx: &Ctx, v: &Value, depth: usize, frame: &mut Vec<Name>) -> Pattern {
        match v {
            Value::Basic(b) => {
                if self.chance(0.85) {
                    Pattern::Basic(b.clone())
                } else {
                    Pattern::Basic(Basic::Int(self.gen_int()))
                }
            }
            Value::Cons(k, args) if depth > 0 => Pattern::Deconstructor(
                k.clone(),
                args.iter().map(|a| self.pattern_for(ctx, a, depth - 1, frame)).collect(),
            ),
            Value::Cons(k, args) => Pattern::Deconstructor(
                k.clone(),
                args.iter().map(|_| self.bind_var(frame)).collect(),
            ),
            Value::List(items) => Pattern::List(self.star_seq(ctx, items, depth, frame)),
            Value::Set(items) => Pattern::Set(self.star_seq(ctx, items.as_slice(), depth, frame)),
            Value::Map(_) | Value::Bottom => self.bind_var(frame),
        }
    }

    fn star_seq(&mut self, ctx: &Ctx, items: &[Value], depth: usize, frame: &mut Vec<Name>) -> Vec<StarPattern> {
        // Occasionally build the pattern for a shorter sequence so that it
        // does not fit.
        let items = match items.split_last() {
            Some((_, init)) if self.chance(0.1) => init,
            _ => items,
        };
        let mut out = Vec::new();
        let mut stars = 0;
        let mut i = 0;
        while i <= items.len() {
            if stars < 2 && self.chance(0.3) {
                let take = self.rng.gen_range(0..=2).min(items.len() - i);
                i += take;
                stars += 1;
                let x = if self.chance(0.2) && !frame.is_empty() {
                    frame.choose(&mut self.rng).expect("non-empty").clone()
                } else {
                    let x = self.fresh("s");
                    if !frame.contains(&x) {
                        frame.push(x.clone());
                    }
                    x
                };
                out.push(StarPattern::Star(VarRef::new(&x)));
                continue;
            }
            if i == items.len() {
                break;
            }
            let p = if depth > 0 {
                self.pattern_for(ctx, &items[i], depth - 1, frame)
            } else {
                self.bind_var(frame)
            };
            out.push(StarPattern::Ordinary(p));
            i += 1;
        }
        out
    }

    /// A `(pattern, value, store)` instance for comparing matching with the
    /// oracle. Variables come from a small pool so that patterns are often
    /// non-linear, and the store sometimes binds some of them.
    pub fn match_instance(&mut self) -> (Pattern, Value, Store) {
        const NAMES: &[&str] = &["x", "y", "z", "w"];
        self.name_pool = Some(NAMES);
        let v = self.any_value(3);
        let target = if self.chance(0.7) { v.clone() } else { self.any_value(2) };
        let mut frame = Vec::new();
        let p = self.pattern_for(&Ctx::default(), &target, 3, &mut frame);
        let mut store = Store::new();
        for n in NAMES {
            if self.chance(0.12) {
                let parts = children(&v);
                let val = match parts.choose(&mut self.rng) {
                    Some(c) if self.chance(0.5) => c.clone(),
                    _ => self.any_value(1),
                };
                store.insert(Arc::from(*n), val);
            }
        }
        self.name_pool = None;
        (p, v, store)
    }
}
