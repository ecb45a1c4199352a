//! Tokenizer for `.rsl` source text.

use num_bigint::BigInt;

use crate::ast::{Span, Strategy};

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(BigInt),
    Str(String),
    Ident(String),
    Strategy(Strategy),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Int(i) => i.to_string(),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Ident(s) => s.clone(),
            Tok::Strategy(st) => st.keyword().to_string(),
            Tok::Sym(s) => (*s).to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

// Longest first, so that `:=` wins over `:`.
const SYMBOLS: &[&str] = &[
    ":=", "<-", "=>", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "(", ")", "[",
    "]", "{", "}", ",", ";", ":", "=", "<", ">", "+", "-", "*", "/", "%", "!", "|",
];

// Hyphenated strategy names, longest first.
const STRATEGIES: &[(&str, Strategy)] = &[
    ("top-down-break", Strategy::TopDownBreak),
    ("bottom-up-break", Strategy::BottomUpBreak),
    ("top-down", Strategy::TopDown),
    ("bottom-up", Strategy::BottomUp),
    ("innermost", Strategy::Innermost),
    ("outermost", Strategy::Outermost),
];

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let start = i;
            match src[i + 2..].find("*/") {
                Some(off) => i += off + 4,
                None => {
                    return Err(ParseError::new(
                        Span::new(start, src.len()),
                        vec!["`*/`".into()],
                        "end of input",
                    ))
                }
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            out.push((Tok::Int(n), Span::new(start, i)));
            continue;
        }
        if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                let Some(ch) = src[i..].chars().next() else {
                    return Err(ParseError::new(
                        Span::new(start, i),
                        vec!["`\"`".into()],
                        "end of input",
                    ));
                };
                i += ch.len_utf8();
                match ch {
                    '"' => break,
                    '\\' => {
                        let esc = src[i..].chars().next();
                        i += esc.map_or(0, char::len_utf8);
                        s.push(match esc {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('r') => '\r',
                            Some('\\') => '\\',
                            Some('"') => '"',
                            other => {
                                return Err(ParseError::new(
                                    Span::new(i - 2, i),
                                    vec!["escape sequence".into()],
                                    other.map_or("end of input".to_string(), |c| format!("\\{c}")),
                                ))
                            }
                        });
                    }
                    ch => s.push(ch),
                }
            }
            out.push((Tok::Str(s), Span::new(start, i)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            for (kw, st) in STRATEGIES {
                let end = i + kw.len();
                if src[i..].starts_with(kw) && !bytes.get(end).is_some_and(|&b| is_ident_char(b) || b == b'-') {
                    out.push((Tok::Strategy(*st), Span::new(i, end)));
                    i = end;
                    continue 'outer;
                }
            }
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), Span::new(start, i)));
            continue;
        }
        for sym in SYMBOLS {
            if src[i..].starts_with(sym) {
                i += sym.len();
                out.push((Tok::Sym(sym), Span::new(start, i)));
                continue 'outer;
            }
        }
        let ch = src[i..].chars().next().expect("non-empty");
        return Err(ParseError::new(
            Span::new(i, i + ch.len_utf8()),
            vec!["token".into()],
            format!("`{ch}`"),
        ));
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    Ok(out)
}
