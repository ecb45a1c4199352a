//! Scope resolution and well-formedness checking.
//!
//! Resolution turns `name(args)` calls that name a constructor into
//! constructor applications and records, for every variable occurrence,
//! which declaration it refers to. Pattern variables that name a variable
//! already in scope are uses (they unify with the stored value at run time);
//! all others introduce fresh bindings for the case body.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::ast::*;
use crate::typing::{DataEnv, Type, BUILTIN_CONSTRUCTORS, BUILTIN_DATATYPES};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WfErrorKind {
    DuplicateName(Name),
    DuplicateParam(Name),
    UndefinedFunction(Name),
    UndefinedConstructor(Name),
    UndefinedVariable(Name),
    UndefinedDatatype(Name),
    Shadowing(Name),
    NotAssignable(Name),
    ArityMismatch {
        name: Name,
        expected: usize,
        found: usize,
    },
}

/// A well-formedness violation inside declaration `decl`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfError {
    pub kind: WfErrorKind,
    pub decl: Name,
    pub span: Span,
}

impl fmt::Display for WfErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WfErrorKind::DuplicateName(n) => write!(f, "duplicate definition of `{n}`"),
            WfErrorKind::DuplicateParam(n) => write!(f, "duplicate parameter `{n}`"),
            WfErrorKind::UndefinedFunction(n) => write!(f, "undefined function `{n}`"),
            WfErrorKind::UndefinedConstructor(n) => write!(f, "undefined constructor `{n}`"),
            WfErrorKind::UndefinedVariable(n) => write!(f, "undefined variable `{n}`"),
            WfErrorKind::UndefinedDatatype(n) => write!(f, "undefined datatype `{n}`"),
            WfErrorKind::Shadowing(n) => write!(f, "`{n}` shadows a variable already in scope"),
            WfErrorKind::NotAssignable(n) => {
                write!(f, "`{n}` is bound by a pattern or clause and cannot be assigned")
            }
            WfErrorKind::ArityMismatch {
                name,
                expected,
                found,
            } => write!(f, "`{name}` expects {expected} arguments, found {found}"),
        }
    }
}

impl fmt::Display for WfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "in `{}` at {}: {}", self.decl, self.span, self.kind)
    }
}

/// A resolved, validated module together with its lookup tables.
#[derive(Clone, Debug)]
pub struct Module {
    def: ModuleDef,
    data: DataEnv,
    functions: HashMap<Name, usize>,
    globals: BTreeMap<Name, Type>,
}

impl Module {
    /// Resolves and validates `def`.
    pub fn new(def: ModuleDef) -> Result<Module, Vec<WfError>> {
        let (def, errors) = resolve_module(def);
        if !errors.is_empty() {
            return Err(errors);
        }
        let data = data_env(&def);
        let functions = def
            .functions
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.clone(), i))
            .collect();
        let globals = def
            .globals
            .iter()
            .map(|g| (g.name.clone(), g.ty.clone()))
            .collect();
        Ok(Module {
            def,
            data,
            functions,
            globals,
        })
    }

    pub fn def(&self) -> &ModuleDef {
        &self.def
    }

    pub fn data(&self) -> &DataEnv {
        &self.data
    }

    pub fn function(&self, name: &str) -> Option<&FunDef> {
        self.functions.get(name).map(|&i| &self.def.functions[i])
    }

    pub fn global_type(&self, name: &str) -> Option<&Type> {
        self.globals.get(name)
    }

    pub fn global_names(&self) -> impl Iterator<Item = &Name> {
        self.def.globals.iter().map(|g| &g.name)
    }

    /// Resolves a free-standing expression in the scope of the module's
    /// globals, as used for evaluating snippets.
    pub fn resolve_expr(&self, mut e: Expr) -> Result<Expr, Vec<WfError>> {
        let mut errors = Vec::new();
        let fun_arity = function_arities(&self.def);
        let mut r = Resolver {
            data: &self.data,
            functions: &fun_arity,
            scopes: vec![global_frame(&self.def)],
            errors: &mut errors,
            decl: Arc::from("<snippet>"),
        };
        r.expr(&mut e);
        if errors.is_empty() {
            Ok(e)
        } else {
            Err(errors)
        }
    }
}

/// All well-formedness violations of `m`, in a deterministic order.
pub fn validate_module(m: &ModuleDef) -> Vec<WfError> {
    resolve_module(m.clone()).1
}

/// The constructor table a module declares, on top of the built-ins.
pub fn data_env(def: &ModuleDef) -> DataEnv {
    let mut data = DataEnv::builtin();
    for d in &def.datatypes {
        for k in &d.constructors {
            data.declare(&d.name, &k.name, k.fields.clone());
        }
    }
    data
}

fn function_arities(def: &ModuleDef) -> HashMap<Name, usize> {
    def.functions
        .iter()
        .map(|f| (f.name.clone(), f.params.len()))
        .collect()
}

fn global_frame(def: &ModuleDef) -> HashMap<Name, Site> {
    def.globals
        .iter()
        .map(|g| (g.name.clone(), Site::Global(g.ty.clone())))
        .collect()
}

/// Resolves all variable sites and constructor calls; returns the resolved
/// module and any violations found.
pub fn resolve_module(mut def: ModuleDef) -> (ModuleDef, Vec<WfError>) {
    let mut errors = Vec::new();
    let data = data_env(&def);

    // Top-level names share one namespace with the built-in declarations.
    let mut seen: HashMap<Name, ()> = HashMap::new();
    for b in BUILTIN_DATATYPES.iter().chain(BUILTIN_CONSTRUCTORS.iter()) {
        seen.insert(Arc::from(*b), ());
    }
    let mut claim = |name: &Name, decl: &Name, span: Span, errors: &mut Vec<WfError>| {
        if seen.insert(name.clone(), ()).is_some() {
            errors.push(WfError {
                kind: WfErrorKind::DuplicateName(name.clone()),
                decl: decl.clone(),
                span,
            });
        }
    };
    for d in &def.datatypes {
        claim(&d.name, &d.name, d.span, &mut errors);
        for k in &d.constructors {
            claim(&k.name, &d.name, d.span, &mut errors);
        }
    }
    for g in &def.globals {
        claim(&g.name, &g.name, g.span, &mut errors);
    }
    for f in &def.functions {
        claim(&f.name, &f.name, f.span, &mut errors);
    }

    let check_type = |t: &Type, decl: &Name, span: Span, errors: &mut Vec<WfError>| {
        check_type_defined(t, &data, decl, span, errors)
    };
    for d in &def.datatypes {
        for k in &d.constructors {
            for (t, _) in &k.fields {
                check_type(t, &d.name, d.span, &mut errors);
            }
        }
    }
    for g in &def.globals {
        check_type(&g.ty, &g.name, g.span, &mut errors);
    }
    for f in &def.functions {
        check_type(&f.ret, &f.name, f.span, &mut errors);
        for p in &f.params {
            check_type(&p.ty, &f.name, f.span, &mut errors);
        }
    }

    let arities = function_arities(&def);
    let globals = global_frame(&def);

    for g in &mut def.globals {
        let mut r = Resolver {
            data: &data,
            functions: &arities,
            scopes: vec![globals.clone()],
            errors: &mut errors,
            decl: g.name.clone(),
        };
        r.expr(&mut g.init);
    }
    for f in &mut def.functions {
        let mut frame = HashMap::new();
        for p in &f.params {
            if frame.contains_key(&p.name) {
                errors.push(WfError {
                    kind: WfErrorKind::DuplicateParam(p.name.clone()),
                    decl: f.name.clone(),
                    span: f.span,
                });
            } else if globals.contains_key(&p.name) {
                errors.push(WfError {
                    kind: WfErrorKind::Shadowing(p.name.clone()),
                    decl: f.name.clone(),
                    span: f.span,
                });
            }
            frame.insert(p.name.clone(), Site::Param(p.ty.clone()));
        }
        let mut r = Resolver {
            data: &data,
            functions: &arities,
            scopes: vec![globals.clone(), frame],
            errors: &mut errors,
            decl: f.name.clone(),
        };
        r.expr(&mut f.body);
    }
    (def, errors)
}

fn check_type_defined(t: &Type, data: &DataEnv, decl: &Name, span: Span, errors: &mut Vec<WfError>) {
    match t {
        Type::Adt(n) if !data.has_datatype(n) => errors.push(WfError {
            kind: WfErrorKind::UndefinedDatatype(n.clone()),
            decl: decl.clone(),
            span,
        }),
        Type::List(t) | Type::Set(t) => check_type_defined(t, data, decl, span, errors),
        Type::Map(k, v) => {
            check_type_defined(k, data, decl, span, errors);
            check_type_defined(v, data, decl, span, errors);
        }
        _ => {}
    }
}

type Frame = HashMap<Name, Site>;

struct Resolver<'a> {
    data: &'a DataEnv,
    functions: &'a HashMap<Name, usize>,
    scopes: Vec<Frame>,
    errors: &'a mut Vec<WfError>,
    decl: Name,
}

impl Resolver<'_> {
    fn err(&mut self, kind: WfErrorKind, span: Span) {
        self.errors.push(WfError {
            kind,
            decl: self.decl.clone(),
            span,
        });
    }

    fn lookup(&self, x: &str) -> Option<&Site> {
        self.scopes.iter().rev().find_map(|f| f.get(x))
    }

    fn check_type(&mut self, t: &Type, span: Span) {
        let data = self.data;
        let decl = self.decl.clone();
        check_type_defined(t, data, &decl, span, self.errors);
    }

    /// Declares a name that must not already be visible.
    fn declare_fresh(&mut self, frame: &mut Frame, x: &Name, site: Site, span: Span) {
        if self.lookup(x).is_some() || frame.contains_key(x) {
            self.err(WfErrorKind::Shadowing(x.clone()), span);
        }
        frame.insert(x.clone(), site);
    }

    fn with_frame(&mut self, frame: Frame, f: impl FnOnce(&mut Self)) {
        self.scopes.push(frame);
        f(self);
        self.scopes.pop();
    }

    fn exprs(&mut self, es: &mut [Expr]) {
        for e in es {
            self.expr(e);
        }
    }

    fn expr(&mut self, e: &mut Expr) {
        crate::deep(|| self.expr_inner(e))
    }

    fn expr_inner(&mut self, e: &mut Expr) {
        let span = e.span;
        if matches!(&e.kind, ExprKind::Call(f, _) if self.data.constructor(f).is_some()) {
            if let ExprKind::Call(k, args) = std::mem::replace(&mut e.kind, ExprKind::Break) {
                e.kind = ExprKind::Cons(k, args);
            }
        }
        match &mut e.kind {
            ExprKind::Basic(_) | ExprKind::Break | ExprKind::Continue | ExprKind::Fail => {}
            ExprKind::Var(v) => match self.lookup(&v.name).cloned() {
                Some(site) => v.site = site,
                None => self.err(WfErrorKind::UndefinedVariable(v.name.clone()), span),
            },
            ExprKind::Assign(v, rhs) => {
                match self.lookup(&v.name).cloned() {
                    Some(Site::Bound) => {
                        self.err(WfErrorKind::NotAssignable(v.name.clone()), span);
                        v.site = Site::Bound;
                    }
                    Some(site) => v.site = site,
                    None => self.err(WfErrorKind::UndefinedVariable(v.name.clone()), span),
                }
                self.expr(rhs);
            }
            ExprKind::Unary(_, a) | ExprKind::Return(a) | ExprKind::Throw(a) => self.expr(a),
            ExprKind::Binary(a, _, b)
            | ExprKind::Lookup(a, b)
            | ExprKind::While(a, b)
            | ExprKind::TryFinally(a, b) => {
                self.expr(a);
                self.expr(b);
            }
            ExprKind::Update(a, b, c) | ExprKind::If(a, b, c) => {
                self.expr(a);
                self.expr(b);
                self.expr(c);
            }
            ExprKind::List(es) | ExprKind::Set(es) => self.exprs(es),
            ExprKind::Map(pairs) => {
                for (k, v) in pairs {
                    self.expr(k);
                    self.expr(v);
                }
            }
            ExprKind::Cons(k, args) => {
                self.check_constructor(k, args.len(), span);
                self.exprs(args);
            }
            ExprKind::Call(f, args) => {
                match self.functions.get(f) {
                    Some(&n) if n != args.len() => self.err(
                        WfErrorKind::ArityMismatch {
                            name: f.clone(),
                            expected: n,
                            found: args.len(),
                        },
                        span,
                    ),
                    Some(_) => {}
                    None => self.err(WfErrorKind::UndefinedFunction(f.clone()), span),
                }
                self.exprs(args);
            }
            ExprKind::Switch(scrut, cases) | ExprKind::Visit(_, scrut, cases) => {
                self.expr(scrut);
                for c in cases {
                    self.case(c, span);
                }
            }
            ExprKind::Block(decls, body) => {
                let mut frame = Frame::new();
                for d in decls.iter() {
                    self.check_type(&d.ty, span);
                    self.declare_fresh(&mut frame, &d.name, Site::Local(d.ty.clone()), span);
                }
                self.with_frame(frame, |r| r.exprs(body));
            }
            ExprKind::For(g, body) => {
                let mut frame = Frame::new();
                match &mut **g {
                    Generator::Enumerating(x, src) => {
                        self.expr(src);
                        let x = x.clone();
                        self.declare_fresh(&mut frame, &x, Site::Bound, span);
                    }
                    Generator::Matching(p, src) => {
                        self.expr(src);
                        self.pattern(p, &mut frame, span);
                    }
                }
                self.with_frame(frame, |r| r.expr(body));
            }
            ExprKind::Solve(xs, body) => {
                for x in xs.iter_mut() {
                    match self.lookup(&x.name).cloned() {
                        Some(site) => x.site = site,
                        None => self.err(WfErrorKind::UndefinedVariable(x.name.clone()), span),
                    }
                }
                self.expr(body);
            }
            ExprKind::TryCatch(a, x, b) => {
                self.expr(a);
                let mut frame = Frame::new();
                let x = x.clone();
                self.declare_fresh(&mut frame, &x, Site::Bound, span);
                self.with_frame(frame, |r| r.expr(b));
            }
        }
    }

    fn check_constructor(&mut self, k: &Name, found: usize, span: Span) {
        match self.data.constructor(k) {
            Some(sig) if sig.arity() != found => {
                let expected = sig.arity();
                self.err(
                    WfErrorKind::ArityMismatch {
                        name: k.clone(),
                        expected,
                        found,
                    },
                    span,
                )
            }
            Some(_) => {}
            None => self.err(WfErrorKind::UndefinedConstructor(k.clone()), span),
        }
    }

    fn case(&mut self, c: &mut Case, span: Span) {
        let mut frame = Frame::new();
        self.pattern(&mut c.pattern, &mut frame, span);
        self.with_frame(frame, |r| r.expr(&mut c.body));
    }

    /// A pattern variable: a use if the name is visible, otherwise a binder.
    fn pattern_var(&mut self, v: &mut VarRef, frame: &mut Frame) {
        if let Some(site) = self.lookup(&v.name).or_else(|| frame.get(&v.name)) {
            v.site = site.clone();
        } else {
            frame.insert(v.name.clone(), Site::Bound);
            v.site = Site::Bound;
        }
    }

    fn pattern(&mut self, p: &mut Pattern, frame: &mut Frame, span: Span) {
        crate::deep(|| self.pattern_inner(p, frame, span))
    }

    fn pattern_inner(&mut self, p: &mut Pattern, frame: &mut Frame, span: Span) {
        match p {
            Pattern::Basic(_) => {}
            Pattern::Var(v) => self.pattern_var(v, frame),
            Pattern::Deconstructor(k, ps) => {
                let k = k.clone();
                self.check_constructor(&k, ps.len(), span);
                for p in ps {
                    self.pattern(p, frame, span);
                }
            }
            Pattern::TypedLabelled(t, x, inner) => {
                self.check_type(t, span);
                let x = x.clone();
                self.declare_fresh(frame, &x, Site::Bound, span);
                self.pattern(inner, frame, span);
            }
            Pattern::List(items) | Pattern::Set(items) => {
                for item in items {
                    match item {
                        StarPattern::Ordinary(p) => self.pattern(p, frame, span),
                        StarPattern::Star(v) => self.pattern_var(v, frame),
                    }
                }
            }
            Pattern::Negation(inner) => {
                // Bindings under a negation never reach the case body.
                let mut scratch = frame.clone();
                self.pattern(inner, &mut scratch, span);
            }
            Pattern::Descendant(inner) => self.pattern(inner, frame, span),
        }
    }
}
