//! Reader for the textual tgd form.
//!
//! ```text
//! tgd   := item (AND item)* -> [EXISTS var (, var)* :] atom (AND atom)*
//! item  := atom | term op term
//! term  := var | 'text' | number | name(term, ...)
//! ```

use crate::error::{Error, Result};
use crate::relational::Constant;

use super::tgd::{Atom, CompareOp, Condition, StTgd, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Arrow,
    Op(CompareOp),
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '#')
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let peek = |i: usize| chars.get(i).map(|&(_, c)| c);
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '=' => Tok::Op(CompareOp::Eq),
            '<' | '>' => {
                let op = if peek(i + 1) == Some('=') {
                    i += 1;
                    if c == '<' {
                        CompareOp::Le
                    } else {
                        CompareOp::Ge
                    }
                } else if c == '<' {
                    CompareOp::Lt
                } else {
                    CompareOp::Gt
                };
                Tok::Op(op)
            }
            '-' if peek(i + 1) == Some('>') => {
                i += 1;
                Tok::Arrow
            }
            '\'' => {
                let mut text = String::new();
                i += 1;
                loop {
                    match peek(i) {
                        None => return Err(err(off, "unterminated string")),
                        Some('\'') if peek(i + 1) == Some('\'') => {
                            text.push('\'');
                            i += 2;
                        }
                        Some('\'') => break,
                        Some(ch) => {
                            text.push(ch);
                            i += 1;
                        }
                    }
                }
                Tok::Str(text)
            }
            c if c.is_ascii_digit() || c == '-' => {
                let start = i;
                i += 1;
                while matches!(peek(i), Some(ch) if ch.is_ascii_digit() || ch == '.') {
                    i += 1;
                }
                let lexeme: String = chars[start..i].iter().map(|&(_, ch)| ch).collect();
                i -= 1;
                if lexeme == "-" {
                    return Err(err(off, "stray '-'"));
                }
                Tok::Num(lexeme)
            }
            c if is_ident_start(c) => {
                let start = i;
                while matches!(peek(i + 1), Some(ch) if is_ident_char(ch)) {
                    i += 1;
                }
                Tok::Ident(chars[start..=i].iter().map(|&(_, ch)| ch).collect())
            }
            other => return Err(err(off, format!("unexpected character {other:?}"))),
        };
        out.push((off, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let off = self.offset();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(err(off, format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<Term> {
        let off = self.offset();
        match self.next() {
            Some(Tok::Str(s)) => Ok(Term::Const(Constant::parse(&s))),
            Some(Tok::Num(n)) => {
                let c = Constant::parse(&n);
                if c.as_decimal().is_none() {
                    return Err(err(off, format!("malformed number {n:?}")));
                }
                Ok(Term::Const(c))
            }
            Some(Tok::Ident(name)) if name == "AND" || name == "EXISTS" => {
                Err(err(off, format!("keyword {name} where a term was expected")))
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        loop {
                            args.push(self.term()?);
                            if self.peek() == Some(&Tok::Comma) {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Term::Func { name, args })
                } else {
                    Ok(Term::Var(name))
                }
            }
            _ => Err(err(off, "expected a term")),
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let off = self.offset();
        match self.term()? {
            Term::Func { name, args } => Ok(Atom {
                relation: name,
                terms: args,
            }),
            _ => Err(err(off, "expected an atom")),
        }
    }
}

/// Parses `a = 'Math'` or `R.id = T.id AND R.x < T.y`: comparisons joined by AND, with
/// identifiers read as variables.
pub fn parse_conditions(src: &str) -> Result<Vec<Condition>> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        end: src.len(),
    };
    let mut out = Vec::new();
    loop {
        let left = p.term()?;
        let off = p.offset();
        let op = match p.next() {
            Some(Tok::Op(op)) => op,
            _ => return Err(err(off, "expected a comparison operator")),
        };
        let right = p.term()?;
        if left.has_function() || right.has_function() {
            return Err(err(off, "conditions compare attributes and constants only"));
        }
        out.push(Condition { left, op, right });
        if !p.keyword("AND") {
            break;
        }
    }
    if p.peek().is_some() {
        return Err(err(p.offset(), "trailing input"));
    }
    Ok(out)
}

pub fn parse_tgd(src: &str) -> Result<StTgd> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        end: src.len(),
    };
    let mut body = Vec::new();
    let mut conditions = Vec::new();
    loop {
        let off = p.offset();
        let left = p.term()?;
        if let Some(Tok::Op(op)) = p.peek().cloned() {
            p.pos += 1;
            let right = p.term()?;
            conditions.push(Condition { left, op, right });
        } else {
            match left {
                Term::Func { name, args } => body.push(Atom {
                    relation: name,
                    terms: args,
                }),
                _ => return Err(err(off, "expected an atom or a comparison")),
            }
        }
        if !p.keyword("AND") {
            break;
        }
    }
    p.expect(Tok::Arrow, "'->'")?;
    let mut existentials = Vec::new();
    if p.keyword("EXISTS") {
        loop {
            let off = p.offset();
            match p.next() {
                Some(Tok::Ident(v)) => existentials.push(v),
                _ => return Err(err(off, "expected an existential variable")),
            }
            match p.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::Colon) => break,
                _ => return Err(err(p.offset(), "expected ',' or ':'")),
            }
        }
    }
    let mut head = vec![p.atom()?];
    while p.keyword("AND") {
        head.push(p.atom()?);
    }
    if p.peek().is_some() {
        return Err(err(p.offset(), "trailing input"));
    }
    StTgd::new(body, conditions, head, existentials)
}
