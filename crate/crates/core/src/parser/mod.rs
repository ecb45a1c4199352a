//! Concrete syntax: a recursive descent parser for modules, expressions,
//! patterns, types and value literals, plus the matching renderer.
//!
//! The grammar is modelled on the listings of the language description:
//!
//! ```text
//! data Nat = zero() | succ(Nat pred);
//! global int counter = 0;
//! Nat double(Nat n) = bottom-up visit(n) { case succ(m) => succ(succ(m)) };
//! int prod(list[int] xs) { int res = 1; for (x <- xs) { res *= x; }; res }
//! ```
//!
//! Braces are a block only in body positions (function bodies, branches,
//! loop bodies, case bodies, try clauses); everywhere else `{ ... }` is a
//! set literal. `local t x, ... in e; ... end` is the block form usable
//! anywhere.

mod lexer;
pub mod render;

use std::fmt;
use std::sync::Arc;

use crate::ast::{
    BinOp, Case, ConsDef, DataDef, Expr, ExprKind, FunDef, Generator, GlobalDef, LocalDecl,
    ModuleDef, Name, Param, Pattern, Span, StarPattern, Strategy, UnOp, VarRef,
};
use crate::typing::Type;
use crate::value::{Basic, Value};

pub use lexer::{tokenize, Tok};
pub use render::{render_expr, render_module, render_pattern, render_type, render_value};

/// Reserved words. None of them can be used as an identifier.
pub const KEYWORDS: &[&str] = &[
    "fail", "break", "continue", "return", "throw", "try", "catch", "finally", "switch", "visit",
    "solve", "for", "while", "if", "then", "else", "local", "in", "end", "data", "global", "case",
    "value", "void", "int", "str", "list", "set", "map",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub fn new(span: Span, expected: Vec<String>, found: impl Into<String>) -> Self {
        ParseError {
            span,
            expected,
            found: found.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expected.as_slice() {
            [] => write!(f, "unexpected {}", self.found),
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(f, "expected one of {}, found {}", many.join(", "), self.found),
        }
    }
}

impl std::error::Error for ParseError {}

/// Source text with a line index for reporting spans as `line:column`.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
    line_starts: Vec<usize>,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let line_starts = std::iter::once(0)
            .chain(text.match_indices('\n').map(|(i, _)| i + 1))
            .collect();
        SourceFile {
            path: path.into(),
            text,
            line_starts,
        }
    }

    /// One-based line and column of a byte offset.
    pub fn line_col(&self, offset: usize) -> (usize, usize) {
        let line = self.line_starts.partition_point(|&s| s <= offset);
        let start = self.line_starts[line - 1];
        let col = self.text[start..offset.min(self.text.len())].chars().count() + 1;
        (line, col)
    }

    pub fn location(&self, span: Span) -> String {
        let (l, c) = self.line_col(span.start);
        format!("{}:{l}:{c}", self.path)
    }

    pub fn parse(&self) -> Result<ModuleDef, ParseError> {
        parse_module(&self.text)
    }
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_module(src: &str) -> PResult<ModuleDef> {
    let mut p = Parser::new(src)?;
    let m = p.module()?;
    p.expect_eof()?;
    Ok(m)
}

pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_pattern(src: &str) -> PResult<Pattern> {
    let mut p = Parser::new(src)?;
    let pat = p.pattern()?;
    p.expect_eof()?;
    Ok(pat)
}

pub fn parse_type(src: &str) -> PResult<Type> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a value literal: basic values, constructor applications, lists,
/// sets, maps, or `<undefined>`.
pub fn parse_value(src: &str) -> PResult<Value> {
    if src.trim() == "<undefined>" {
        return Ok(Value::Bottom);
    }
    let e = parse_expr(src)?;
    expr_to_value(&e).ok_or_else(|| ParseError::new(e.span, vec!["a value literal".into()], "an expression"))
}

/// The value denoted by a literal expression, if it is one. Applications are
/// read as constructor values without checking them against any datatype.
pub fn expr_to_value(e: &Expr) -> Option<Value> {
    let all = |es: &[Expr]| es.iter().map(expr_to_value).collect::<Option<Vec<_>>>();
    Some(match &e.kind {
        ExprKind::Basic(b) => Value::Basic(b.clone()),
        ExprKind::Call(k, args) | ExprKind::Cons(k, args) => Value::Cons(k.clone(), all(args)?.into()),
        ExprKind::List(es) => Value::list(all(es)?),
        ExprKind::Set(es) => Value::set(all(es)?),
        ExprKind::Map(pairs) => Value::map(
            pairs
                .iter()
                .map(|(k, v)| Some((expr_to_value(k)?, expr_to_value(v)?)))
                .collect::<Option<Vec<_>>>()?,
        ),
        _ => return None,
    })
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    last_end: usize,
}

fn name(s: &str) -> Name {
    Arc::from(s)
}

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            last_end: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn start(&self) -> usize {
        self.span().start
    }

    fn since(&self, start: usize) -> Span {
        Span::new(start, self.last_end.max(start))
    }

    fn bump(&mut self) -> Tok {
        let (t, s) = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        self.last_end = s.end;
        t
    }

    fn prev_tok(&self) -> Option<&Tok> {
        self.pos.checked_sub(1).map(|i| &self.toks[i].0)
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError::new(
            self.span(),
            expected.iter().map(|s| s.to_string()).collect(),
            format!("`{}`", self.peek().describe()),
        ))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&[&format!("`{s}`")])
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.error(&[&format!("`{s}`")])
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let n = name(s);
                self.bump();
                Ok(n)
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn is_ident_at(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if !is_keyword(s))
    }

    // ---- types -------------------------------------------------------

    /// Whether a type starts here, followed by a name: the shape of
    /// declarations and typed labels.
    fn starts_typed_name(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) if matches!(s.as_str(), "int" | "str" | "value" | "void" | "list" | "set" | "map") => {
                true
            }
            Tok::Ident(s) if !is_keyword(s) => self.is_ident_at(1),
            _ => false,
        }
    }

    fn ty(&mut self) -> PResult<Type> {
        let t = match self.peek().clone() {
            Tok::Ident(s) => match s.as_str() {
                "int" => Type::Int,
                "str" => Type::Str,
                "value" => Type::Value,
                "void" => Type::Void,
                "list" | "set" | "map" => {
                    self.bump();
                    let close = if self.eat_sym("[") {
                        "]"
                    } else if self.eat_sym("<") {
                        ">"
                    } else {
                        return self.error(&["`[`", "`<`"]);
                    };
                    let first = self.ty()?;
                    let t = if s == "map" {
                        self.expect_sym(",")?;
                        Type::map(first, self.ty()?)
                    } else if s == "list" {
                        Type::list(first)
                    } else {
                        Type::set(first)
                    };
                    self.expect_sym(close)?;
                    return Ok(t);
                }
                other if !is_keyword(other) => Type::Adt(name(other)),
                _ => return self.error(&["type"]),
            },
            _ => return self.error(&["type"]),
        };
        self.bump();
        Ok(t)
    }

    // ---- declarations --------------------------------------------------

    fn module(&mut self) -> PResult<ModuleDef> {
        let mut m = ModuleDef::default();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(m),
                Tok::Ident(s) if s == "data" => m.datatypes.push(self.data_def()?),
                Tok::Ident(s) if s == "global" => m.globals.push(self.global_def()?),
                _ => m.functions.push(self.fun_def()?),
            }
        }
    }

    fn data_def(&mut self) -> PResult<DataDef> {
        let start = self.start();
        self.expect_kw("data")?;
        let n = self.ident()?;
        self.expect_sym("=")?;
        let mut constructors = vec![self.cons_def()?];
        while self.eat_sym("|") {
            constructors.push(self.cons_def()?);
        }
        self.expect_sym(";")?;
        Ok(DataDef {
            name: n,
            constructors,
            span: self.since(start),
        })
    }

    fn cons_def(&mut self) -> PResult<ConsDef> {
        let n = self.ident()?;
        self.expect_sym("(")?;
        let mut fields = Vec::new();
        if !self.is_sym(")") {
            loop {
                let t = self.ty()?;
                fields.push((t, self.ident()?));
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        Ok(ConsDef { name: n, fields })
    }

    fn global_def(&mut self) -> PResult<GlobalDef> {
        let start = self.start();
        self.expect_kw("global")?;
        let ty = self.ty()?;
        let n = self.ident()?;
        self.expect_sym("=")?;
        let init = self.expr()?;
        self.expect_sym(";")?;
        Ok(GlobalDef {
            name: n,
            ty,
            init,
            span: self.since(start),
        })
    }

    fn fun_def(&mut self) -> PResult<FunDef> {
        let start = self.start();
        if !self.starts_typed_name() {
            return self.error(&["`data`", "`global`", "function definition"]);
        }
        let ret = self.ty()?;
        let n = self.ident()?;
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if !self.is_sym(")") {
            loop {
                let ty = self.ty()?;
                params.push(Param {
                    ty,
                    name: self.ident()?,
                });
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        let body = if self.is_sym("{") {
            let b = self.brace_block()?;
            self.eat_sym(";");
            b
        } else {
            self.expect_sym("=")?;
            if self.is_sym("{") {
                let b = self.brace_block()?;
                self.eat_sym(";");
                b
            } else {
                let e = self.expr()?;
                self.expect_sym(";")?;
                e
            }
        };
        Ok(FunDef {
            name: n,
            ret,
            params,
            body,
            span: self.since(start),
        })
    }

    // ---- blocks and bodies ---------------------------------------------

    /// `{ item; ... }` where items are expressions or `t x (= e)?`
    /// declarations. Declarations are hoisted into the block's locals.
    fn brace_block(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.expect_sym("{")?;
        let mut decls = Vec::new();
        let mut es = Vec::new();
        loop {
            if self.eat_sym("}") {
                break;
            }
            if self.starts_typed_name() {
                let dstart = self.start();
                let ty = self.ty()?;
                let x = self.ident()?;
                decls.push(LocalDecl { ty, name: x.clone() });
                if self.eat_sym("=") {
                    let rhs = self.expr()?;
                    let span = self.since(dstart);
                    es.push(Expr::new(
                        ExprKind::Assign(VarRef::new(&x), Box::new(rhs)),
                        span,
                    ));
                }
            } else {
                es.push(self.expr()?);
            }
            if self.eat_sym(";") || self.is_sym("}") || self.prev_tok() == Some(&Tok::Sym("}")) {
                continue;
            }
            return self.error(&["`;`", "`}`"]);
        }
        Ok(Expr::new(ExprKind::Block(decls, es), self.since(start)))
    }

    fn body(&mut self) -> PResult<Expr> {
        if self.is_sym("{") {
            self.brace_block()
        } else {
            self.expr()
        }
    }

    fn local_block(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.expect_kw("local")?;
        let mut decls = Vec::new();
        if !self.is_kw("in") {
            loop {
                let ty = self.ty()?;
                decls.push(LocalDecl {
                    ty,
                    name: self.ident()?,
                });
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_kw("in")?;
        let mut es = Vec::new();
        while !self.eat_kw("end") {
            es.push(self.expr()?);
            if !self.eat_sym(";") && !self.is_kw("end") && self.prev_tok() != Some(&Tok::Sym("}")) {
                return self.error(&["`;`", "`end`"]);
            }
        }
        Ok(Expr::new(ExprKind::Block(decls, es), self.since(start)))
    }

    // ---- expressions ---------------------------------------------------

    fn expr(&mut self) -> PResult<Expr> {
        crate::deep(|| self.expr_inner())
    }

    fn expr_inner(&mut self) -> PResult<Expr> {
        let start = self.start();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => String::new(),
        };
        match kw.as_str() {
            "return" | "throw" => {
                self.bump();
                let e = Box::new(self.expr()?);
                let kind = if kw == "return" {
                    ExprKind::Return(e)
                } else {
                    ExprKind::Throw(e)
                };
                return Ok(Expr::new(kind, self.since(start)));
            }
            "if" => return self.if_expr(),
            "for" => {
                self.bump();
                self.expect_sym("(")?;
                let g = self.generator()?;
                self.expect_sym(")")?;
                let body = self.body()?;
                return Ok(Expr::new(
                    ExprKind::For(Box::new(g), Box::new(body)),
                    self.since(start),
                ));
            }
            "while" => {
                self.bump();
                self.expect_sym("(")?;
                let c = self.expr()?;
                self.expect_sym(")")?;
                let body = self.body()?;
                return Ok(Expr::new(
                    ExprKind::While(Box::new(c), Box::new(body)),
                    self.since(start),
                ));
            }
            "solve" => {
                self.bump();
                self.expect_sym("(")?;
                let mut xs = vec![VarRef::new(&self.ident()?)];
                while self.eat_sym(",") {
                    xs.push(VarRef::new(&self.ident()?));
                }
                self.expect_sym(")")?;
                let body = self.body()?;
                return Ok(Expr::new(ExprKind::Solve(xs, Box::new(body)), self.since(start)));
            }
            "try" => return self.try_expr(),
            _ => {}
        }
        if self.is_ident_at(0) {
            let op = match self.peek_at(1) {
                Tok::Sym("=") => Some(None),
                Tok::Sym("+=") => Some(Some(BinOp::Add)),
                Tok::Sym("-=") => Some(Some(BinOp::Sub)),
                Tok::Sym("*=") => Some(Some(BinOp::Mul)),
                Tok::Sym("/=") => Some(Some(BinOp::Div)),
                _ => None,
            };
            if let Some(op) = op {
                let x_span = self.span();
                let x = self.ident()?;
                self.bump();
                let mut rhs = self.expr()?;
                if let Some(op) = op {
                    let span = rhs.span;
                    let var = Expr::new(ExprKind::Var(VarRef::new(&x)), x_span);
                    rhs = Expr::new(ExprKind::Binary(Box::new(var), op, Box::new(rhs)), span);
                }
                return Ok(Expr::new(
                    ExprKind::Assign(VarRef::new(&x), Box::new(rhs)),
                    self.since(start),
                ));
            }
        }
        self.binary(1)
    }

    fn if_expr(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.expect_kw("if")?;
        self.expect_sym("(")?;
        let c = self.expr()?;
        self.expect_sym(")")?;
        self.eat_kw("then");
        let a = self.body()?;
        if self.is_sym(";") && matches!(self.peek_at(1), Tok::Ident(s) if s == "else") {
            self.bump();
        }
        self.expect_kw("else")?;
        let b = self.body()?;
        Ok(Expr::new(
            ExprKind::If(Box::new(c), Box::new(a), Box::new(b)),
            self.since(start),
        ))
    }

    fn skip_semi_before(&mut self, kw: &str) {
        if self.is_sym(";") && matches!(self.peek_at(1), Tok::Ident(s) if s == kw) {
            self.bump();
        }
    }

    fn try_expr(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.expect_kw("try")?;
        let mut e = self.body()?;
        let mut any = false;
        self.skip_semi_before("catch");
        if self.eat_kw("catch") {
            let x = self.ident()?;
            if !self.eat_sym("=>") {
                self.expect_sym(":")?;
            }
            let handler = self.body()?;
            e = Expr::new(
                ExprKind::TryCatch(Box::new(e), x, Box::new(handler)),
                self.since(start),
            );
            any = true;
        }
        self.skip_semi_before("finally");
        if self.eat_kw("finally") {
            let fin = self.body()?;
            e = Expr::new(ExprKind::TryFinally(Box::new(e), Box::new(fin)), self.since(start));
            any = true;
        }
        if !any {
            return self.error(&["`catch`", "`finally`"]);
        }
        Ok(e)
    }

    fn generator(&mut self) -> PResult<Generator> {
        if self.is_ident_at(0) && self.peek_at(1) == &Tok::Sym("<-") {
            let x = self.ident()?;
            self.bump();
            return Ok(Generator::Enumerating(x, self.expr()?));
        }
        let p = self.pattern()?;
        self.expect_sym(":=")?;
        Ok(Generator::Matching(p, self.expr()?))
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Sym("||") => BinOp::Or,
            Tok::Sym("&&") => BinOp::And,
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Neq,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Ident(s) if s == "in" => BinOp::In,
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            Tok::Sym("/") => BinOp::Div,
            Tok::Sym("%") => BinOp::Mod,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators associate to the left.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let start = self.start();
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::new(
                ExprKind::Binary(Box::new(lhs), op, Box::new(rhs)),
                self.since(start),
            );
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        crate::deep(|| self.unary_inner())
    }

    fn unary_inner(&mut self) -> PResult<Expr> {
        let start = self.start();
        if self.is_sym("-") {
            if let Tok::Int(i) = self.peek_at(1).clone() {
                self.bump();
                self.bump();
                let lit = Expr::new(ExprKind::Basic(Basic::Int(-i)), self.since(start));
                return self.postfix(lit, start);
            }
            self.bump();
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(e)), self.since(start)));
        }
        if self.eat_sym("!") {
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), self.since(start)));
        }
        let e = self.primary()?;
        self.postfix(e, start)
    }

    fn postfix(&mut self, mut e: Expr, start: usize) -> PResult<Expr> {
        while self.eat_sym("[") {
            let key = self.binary(1)?;
            if self.eat_sym("=") {
                let v = self.expr()?;
                self.expect_sym("]")?;
                e = Expr::new(
                    ExprKind::Update(Box::new(e), Box::new(key), Box::new(v)),
                    self.since(start),
                );
            } else {
                self.expect_sym("]")?;
                e = Expr::new(ExprKind::Lookup(Box::new(e), Box::new(key)), self.since(start));
            }
        }
        Ok(e)
    }

    fn expr_list(&mut self, close: &str) -> PResult<Vec<Expr>> {
        let mut es = Vec::new();
        if self.eat_sym(close) {
            return Ok(es);
        }
        loop {
            es.push(self.expr()?);
            if self.eat_sym(close) {
                return Ok(es);
            }
            if !self.eat_sym(",") {
                return self.error(&["`,`", &format!("`{close}`")]);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        crate::deep(|| self.primary_inner())
    }

    fn primary_inner(&mut self) -> PResult<Expr> {
        let start = self.start();
        let kind = match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                ExprKind::Basic(Basic::Int(i))
            }
            Tok::Str(s) => {
                self.bump();
                ExprKind::Basic(Basic::str(&s))
            }
            Tok::Sym("[") => {
                self.bump();
                ExprKind::List(self.expr_list("]")?)
            }
            Tok::Sym("{") => {
                self.bump();
                ExprKind::Set(self.expr_list("}")?)
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    ExprKind::Map(Vec::new())
                } else {
                    let first = self.expr()?;
                    if self.eat_sym(")") {
                        let mut e = first;
                        e.span = self.since(start);
                        return Ok(e);
                    }
                    self.expect_sym(":")?;
                    let mut pairs = vec![(first, self.expr()?)];
                    while self.eat_sym(",") {
                        let k = self.expr()?;
                        self.expect_sym(":")?;
                        pairs.push((k, self.expr()?));
                    }
                    self.expect_sym(")")?;
                    ExprKind::Map(pairs)
                }
            }
            Tok::Strategy(_) => return self.visit_expr(),
            Tok::Ident(s) => match s.as_str() {
                "visit" => return self.visit_expr(),
                "switch" => {
                    self.bump();
                    self.expect_sym("(")?;
                    let e = self.expr()?;
                    self.expect_sym(")")?;
                    let cs = self.cases()?;
                    ExprKind::Switch(Box::new(e), cs)
                }
                "local" => return self.local_block(),
                "fail" => {
                    self.bump();
                    ExprKind::Fail
                }
                "break" => {
                    self.bump();
                    ExprKind::Break
                }
                "continue" => {
                    self.bump();
                    ExprKind::Continue
                }
                s if !is_keyword(s) => {
                    let n = self.ident()?;
                    if self.eat_sym("(") {
                        ExprKind::Call(n, self.expr_list(")")?)
                    } else {
                        ExprKind::Var(VarRef::new(&n))
                    }
                }
                _ => return self.error(&["expression"]),
            },
            _ => return self.error(&["expression"]),
        };
        Ok(Expr::new(kind, self.since(start)))
    }

    fn visit_expr(&mut self) -> PResult<Expr> {
        let start = self.start();
        let st = match self.peek() {
            Tok::Strategy(st) => {
                let st = *st;
                self.bump();
                st
            }
            _ => Strategy::TopDown,
        };
        self.expect_kw("visit")?;
        self.expect_sym("(")?;
        let e = self.expr()?;
        self.expect_sym(")")?;
        let cs = self.cases()?;
        Ok(Expr::new(ExprKind::Visit(st, Box::new(e), cs), self.since(start)))
    }

    fn cases(&mut self) -> PResult<Vec<Case>> {
        self.expect_sym("{")?;
        let mut cs = Vec::new();
        loop {
            if self.eat_sym("}") {
                return Ok(cs);
            }
            if !self.eat_kw("case") {
                return self.error(&["`case`", "`}`"]);
            }
            let pattern = self.pattern()?;
            if !self.eat_sym("=>") && !self.eat_sym(":") {
                return self.error(&["`=>`", "`:`"]);
            }
            let body = self.body()?;
            cs.push(Case { pattern, body });
            self.eat_sym(";");
        }
    }

    // ---- patterns ------------------------------------------------------

    fn pattern(&mut self) -> PResult<Pattern> {
        crate::deep(|| self.pattern_inner())
    }

    fn pattern_inner(&mut self) -> PResult<Pattern> {
        match self.peek().clone() {
            Tok::Sym("!") => {
                self.bump();
                Ok(Pattern::Negation(Box::new(self.pattern()?)))
            }
            Tok::Sym("/") => {
                self.bump();
                Ok(Pattern::Descendant(Box::new(self.pattern()?)))
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.pattern()?;
                self.expect_sym(")")?;
                Ok(p)
            }
            Tok::Sym("[") => {
                self.bump();
                Ok(Pattern::List(self.star_patterns("]")?))
            }
            Tok::Sym("{") => {
                self.bump();
                Ok(Pattern::Set(self.star_patterns("}")?))
            }
            Tok::Int(i) => {
                self.bump();
                Ok(Pattern::Basic(Basic::Int(i)))
            }
            Tok::Sym("-") if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let Tok::Int(i) = self.bump() else { unreachable!() };
                Ok(Pattern::Basic(Basic::Int(-i)))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Pattern::Basic(Basic::str(&s)))
            }
            _ if self.starts_typed_name() => {
                let t = self.ty()?;
                let x = self.ident()?;
                self.expect_sym(":")?;
                Ok(Pattern::TypedLabelled(t, x, Box::new(self.pattern()?)))
            }
            _ => {
                let n = self.ident().or_else(|_| self.error(&["pattern"]))?;
                if self.eat_sym("(") {
                    let mut ps = Vec::new();
                    if !self.eat_sym(")") {
                        loop {
                            ps.push(self.pattern()?);
                            if self.eat_sym(")") {
                                break;
                            }
                            self.expect_sym(",")?;
                        }
                    }
                    Ok(Pattern::Deconstructor(n, ps))
                } else {
                    Ok(Pattern::Var(VarRef::new(&n)))
                }
            }
        }
    }

    fn star_patterns(&mut self, close: &str) -> PResult<Vec<StarPattern>> {
        let mut ps = Vec::new();
        if self.eat_sym(close) {
            return Ok(ps);
        }
        loop {
            if self.eat_sym("*") {
                ps.push(StarPattern::Star(VarRef::new(&self.ident()?)));
            } else {
                ps.push(StarPattern::Ordinary(self.pattern()?));
            }
            if self.eat_sym(close) {
                return Ok(ps);
            }
            if !self.eat_sym(",") {
                return self.error(&["`,`", &format!("`{close}`")]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(x: &str) -> Expr {
        Expr::synth(ExprKind::Var(VarRef::new(x)))
    }

    fn int(i: i64) -> Expr {
        Expr::synth(ExprKind::Basic(Basic::int(i)))
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 + 2 * 3 - 4").unwrap();
        let mul = Expr::synth(ExprKind::Binary(Box::new(int(2)), BinOp::Mul, Box::new(int(3))));
        let add = Expr::synth(ExprKind::Binary(Box::new(int(1)), BinOp::Add, Box::new(mul)));
        assert_eq!(e, Expr::synth(ExprKind::Binary(Box::new(add), BinOp::Sub, Box::new(int(4)))));
        let e = parse_expr("a || b && c == d").unwrap();
        let ExprKind::Binary(_, BinOp::Or, rhs) = e.kind else { panic!("{e:?}") };
        assert!(matches!(rhs.kind, ExprKind::Binary(_, BinOp::And, _)));
    }

    #[test]
    fn negative_literals_fold() {
        assert_eq!(parse_expr("-3").unwrap(), int(-3));
        assert_eq!(
            parse_expr("-x").unwrap(),
            Expr::synth(ExprKind::Unary(UnOp::Neg, Box::new(var("x"))))
        );
        assert_eq!(
            parse_expr("1 - 3").unwrap(),
            Expr::synth(ExprKind::Binary(Box::new(int(1)), BinOp::Sub, Box::new(int(3))))
        );
    }

    #[test]
    fn maps_grouping_and_postfix() {
        assert_eq!(parse_expr("()").unwrap().kind, ExprKind::Map(vec![]));
        assert_eq!(parse_expr("(1)").unwrap(), int(1));
        assert_eq!(
            parse_expr("(1:2)[3]").unwrap(),
            Expr::synth(ExprKind::Lookup(
                Box::new(Expr::synth(ExprKind::Map(vec![(int(1), int(2))]))),
                Box::new(int(3))
            ))
        );
        assert!(matches!(parse_expr("m[1 = 2]").unwrap().kind, ExprKind::Update(..)));
    }

    #[test]
    fn assignment_sugar() {
        let e = parse_expr("x *= 2").unwrap();
        let rhs = Expr::synth(ExprKind::Binary(Box::new(var("x")), BinOp::Mul, Box::new(int(2))));
        assert_eq!(e, Expr::synth(ExprKind::Assign(VarRef::new("x"), Box::new(rhs))));
    }

    #[test]
    fn brace_bodies_hoist_declarations() {
        let m = parse_module("int f() { int x = 1; list[int] ys; x }").unwrap();
        let ExprKind::Block(decls, es) = &m.functions[0].body.kind else { panic!() };
        assert_eq!(decls.len(), 2);
        assert_eq!(decls[1].ty, Type::list(Type::Int));
        assert_eq!(es.len(), 2);
        assert!(matches!(es[0].kind, ExprKind::Assign(..)));
    }

    #[test]
    fn if_accepts_semicolon_before_else() {
        let e = parse_expr("if (x == 0) return 0; else res *= x").unwrap();
        assert!(matches!(e.kind, ExprKind::If(..)));
        assert!(parse_expr("if (x) 1").is_err());
    }

    #[test]
    fn visits_and_switches() {
        let e = parse_expr("bottom-up visit(e) { case plus(intlit(0), y) => y case x : x }").unwrap();
        let ExprKind::Visit(Strategy::BottomUp, _, cs) = e.kind else { panic!() };
        assert_eq!(cs.len(), 2);
        let e = parse_expr("visit(e) { case x => x; }").unwrap();
        assert!(matches!(e.kind, ExprKind::Visit(Strategy::TopDown, _, _)));
        let e = parse_expr("switch (s) { case {*xs, *ys}: xs }").unwrap();
        let ExprKind::Switch(_, cs) = e.kind else { panic!() };
        let Pattern::Set(ps) = &cs[0].pattern else { panic!() };
        assert!(ps.iter().all(|p| matches!(p, StarPattern::Star(_))));
    }

    #[test]
    fn patterns() {
        assert_eq!(
            parse_pattern("Nat n : succ(_x)").unwrap(),
            Pattern::TypedLabelled(
                Type::adt("Nat"),
                name("n"),
                Box::new(Pattern::Deconstructor(
                    name("succ"),
                    vec![Pattern::Var(VarRef::new("_x"))]
                ))
            )
        );
        assert_eq!(
            parse_pattern("!/-1").unwrap(),
            Pattern::Negation(Box::new(Pattern::Descendant(Box::new(Pattern::Basic(Basic::int(-1))))))
        );
        assert!(matches!(parse_pattern("[1, *xs]").unwrap(), Pattern::List(ps) if ps.len() == 2));
    }

    #[test]
    fn types() {
        assert_eq!(
            parse_type("map[int, list<str>]").unwrap(),
            Type::map(Type::Int, Type::list(Type::Str))
        );
        assert!(parse_type("list[int>").is_err());
    }

    #[test]
    fn malformed_data_reports_position() {
        let err = parse_module("data D = k(;").unwrap_err();
        assert_eq!(err.span, Span::new(11, 12));
        assert_eq!(err.found, "`;`");
    }

    #[test]
    fn keywords_are_not_identifiers() {
        assert!(parse_expr("visit").is_err());
        assert!(parse_expr("end").is_err());
        assert!(parse_module("int value() = 1;").is_err());
    }

    #[test]
    fn value_literals() {
        assert_eq!(parse_value("<undefined>").unwrap(), Value::Bottom);
        assert_eq!(
            parse_value("{2, 1, 2}").unwrap(),
            Value::set([Value::int(1), Value::int(2)])
        );
        assert_eq!(
            parse_value("k(\"a\", [()])").unwrap(),
            Value::cons("k", [Value::str("a"), Value::list([Value::map([])])])
        );
        assert!(parse_value("1 + 2").is_err());
    }

    #[test]
    fn line_and_column() {
        let f = SourceFile::new("m.rsl", "ab\ncd\r\nef");
        assert_eq!(f.line_col(0), (1, 1));
        assert_eq!(f.line_col(4), (2, 2));
        assert_eq!(f.line_col(7), (3, 1));
    }
}
