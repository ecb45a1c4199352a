//! Abstract syntax of modules, expressions and patterns.

use std::fmt;
use std::sync::Arc;

use crate::typing::Type;
use crate::value::Basic;

pub type Name = Arc<str>;

/// Byte range into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    In,
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Neg => "-",
            UnOp::Not => "!",
        }
    }
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::In => "in",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Neq => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::In => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 6,
        }
    }

    pub const ALL: [BinOp; 14] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
        BinOp::Eq,
        BinOp::Neq,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
        BinOp::In,
    ];
}

/// Traversal strategies of `visit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    TopDown,
    BottomUp,
    TopDownBreak,
    BottomUpBreak,
    Outermost,
    Innermost,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::TopDown,
        Strategy::BottomUp,
        Strategy::TopDownBreak,
        Strategy::BottomUpBreak,
        Strategy::Outermost,
        Strategy::Innermost,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Strategy::TopDown => "top-down",
            Strategy::BottomUp => "bottom-up",
            Strategy::TopDownBreak => "top-down-break",
            Strategy::BottomUpBreak => "bottom-up-break",
            Strategy::Outermost => "outermost",
            Strategy::Innermost => "innermost",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Strategy> {
        Strategy::ALL.into_iter().find(|st| st.keyword() == s)
    }
}

/// Where a variable occurrence was declared, filled in by scope resolution.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Site {
    Unresolved,
    Global(Type),
    Local(Type),
    Param(Type),
    /// Introduced by a pattern, generator or catch clause.
    Bound,
}

impl Site {
    /// The declared type when the variable may be assigned.
    pub fn declared_type(&self) -> Option<&Type> {
        match self {
            Site::Global(t) | Site::Local(t) | Site::Param(t) => Some(t),
            Site::Unresolved | Site::Bound => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub name: Name,
    pub site: Site,
}

impl VarRef {
    pub fn new(name: &str) -> Self {
        VarRef {
            name: Arc::from(name),
            site: Site::Unresolved,
        }
    }
}

/// An expression with its source span. Equality ignores spans.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// An expression with an empty span, for programmatic construction.
    pub fn synth(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Basic(Basic),
    Var(VarRef),
    Unary(UnOp, Box<Expr>),
    Binary(Box<Expr>, BinOp, Box<Expr>),
    Cons(Name, Vec<Expr>),
    List(Vec<Expr>),
    Set(Vec<Expr>),
    Map(Vec<(Expr, Expr)>),
    Lookup(Box<Expr>, Box<Expr>),
    Update(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(Name, Vec<Expr>),
    Return(Box<Expr>),
    Assign(VarRef, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Switch(Box<Expr>, Vec<Case>),
    Visit(Strategy, Box<Expr>, Vec<Case>),
    Break,
    Continue,
    Fail,
    Block(Vec<LocalDecl>, Vec<Expr>),
    For(Box<Generator>, Box<Expr>),
    While(Box<Expr>, Box<Expr>),
    Solve(Vec<VarRef>, Box<Expr>),
    Throw(Box<Expr>),
    TryCatch(Box<Expr>, Name, Box<Expr>),
    TryFinally(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDecl {
    pub ty: Type,
    pub name: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub pattern: Pattern,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Enumerating(Name, Expr),
    Matching(Pattern, Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Basic(Basic),
    Var(VarRef),
    Deconstructor(Name, Vec<Pattern>),
    TypedLabelled(Type, Name, Box<Pattern>),
    List(Vec<StarPattern>),
    Set(Vec<StarPattern>),
    Negation(Box<Pattern>),
    Descendant(Box<Pattern>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarPattern {
    Ordinary(Pattern),
    Star(VarRef),
}

#[derive(Clone, Debug)]
pub struct GlobalDef {
    pub name: Name,
    pub ty: Type,
    pub init: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub ty: Type,
    pub name: Name,
}

#[derive(Clone, Debug)]
pub struct FunDef {
    pub name: Name,
    pub ret: Type,
    pub params: Vec<Param>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsDef {
    pub name: Name,
    pub fields: Vec<(Type, Name)>,
}

#[derive(Clone, Debug)]
pub struct DataDef {
    pub name: Name,
    pub constructors: Vec<ConsDef>,
    pub span: Span,
}

// Declarations, like expressions, compare without their spans.
macro_rules! eq_ignoring_span {
    ($ty:ident { $($field:ident),* }) => {
        impl PartialEq for $ty {
            fn eq(&self, other: &Self) -> bool {
                true $(&& self.$field == other.$field)*
            }
        }

        impl Eq for $ty {}
    };
}

eq_ignoring_span!(GlobalDef { name, ty, init });
eq_ignoring_span!(FunDef { name, ret, params, body });
eq_ignoring_span!(DataDef { name, constructors });

/// A parsed module: datatypes, globals (in initialization order) and functions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModuleDef {
    pub datatypes: Vec<DataDef>,
    pub globals: Vec<GlobalDef>,
    pub functions: Vec<FunDef>,
}

/// Applies `f` to every direct sub-expression, including case bodies and
/// generator sources.
pub fn for_each_child(e: &Expr, mut f: impl FnMut(&Expr)) {
    match &e.kind {
        ExprKind::Basic(_)
        | ExprKind::Var(_)
        | ExprKind::Break
        | ExprKind::Continue
        | ExprKind::Fail => {}
        ExprKind::Unary(_, a)
        | ExprKind::Return(a)
        | ExprKind::Assign(_, a)
        | ExprKind::Throw(a)
        | ExprKind::Solve(_, a) => f(a),
        ExprKind::Binary(a, _, b)
        | ExprKind::Lookup(a, b)
        | ExprKind::While(a, b)
        | ExprKind::TryCatch(a, _, b)
        | ExprKind::TryFinally(a, b) => {
            f(a);
            f(b);
        }
        ExprKind::Update(a, b, c) | ExprKind::If(a, b, c) => {
            f(a);
            f(b);
            f(c);
        }
        ExprKind::Cons(_, es)
        | ExprKind::List(es)
        | ExprKind::Set(es)
        | ExprKind::Call(_, es)
        | ExprKind::Block(_, es) => es.iter().for_each(f),
        ExprKind::Map(pairs) => {
            for (k, v) in pairs {
                f(k);
                f(v);
            }
        }
        ExprKind::Switch(scrut, cases) | ExprKind::Visit(_, scrut, cases) => {
            f(scrut);
            for c in cases {
                f(&c.body);
            }
        }
        ExprKind::For(g, body) => {
            match &**g {
                Generator::Enumerating(_, src) | Generator::Matching(_, src) => f(src),
            }
            f(body);
        }
    }
}

/// Whether `e` lies in the terminating fragment: no `while`, no `solve`, no
/// function calls, and only bottom-up traversals, at any depth. Every call
/// counts as a function call; see [`is_finite_subset_with`].
pub fn is_finite_subset(e: &Expr) -> bool {
    is_finite_subset_with(e, &|_| true)
}

/// Like [`is_finite_subset`], but a call `f(..)` only leaves the fragment
/// when `is_function(f)` holds. The parser reads constructor applications
/// as calls, so this lets them through.
pub fn is_finite_subset_with(e: &Expr, is_function: &dyn Fn(&str) -> bool) -> bool {
    let here = match &e.kind {
        ExprKind::While(..) | ExprKind::Solve(..) => false,
        ExprKind::Call(f, _) => !is_function(f),
        ExprKind::Visit(st, ..) => matches!(st, Strategy::BottomUp | Strategy::BottomUpBreak),
        _ => true,
    };
    if !here {
        return false;
    }
    let mut ok = true;
    for_each_child(e, |c| ok = ok && is_finite_subset_with(c, is_function));
    ok
}

/// Number of expression nodes, counting case bodies and generator sources.
pub fn expr_size(e: &Expr) -> usize {
    let mut n = 1;
    for_each_child(e, |c| n += expr_size(c));
    n
}
