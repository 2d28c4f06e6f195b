//! Text grammar for polynomials.
//!
//! Terms joined by `+`/`-`; a term is factors joined by `*` (juxtaposition
//! of a coefficient and a variable is also accepted); factors are rationals
//! `a/b`, variables, or parenthesized subexpressions, each with an optional
//! nonnegative integer power. Whitespace is insignificant.

use super::{Exponent, Polynomial, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Int(n)));
            }
            _ if b.is_ascii_alphabetic() || b == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(Error::Parse {
                    position: i,
                    message: format!("unexpected character `{}`", b as char),
                });
            }
        }
    }
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(usize::MAX)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }
}

struct Parser<'a> {
    lx: Lexer,
    vars: &'a [String],
    dim: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.lx.here(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut negate = false;
        match self.lx.peek() {
            Some(Tok::Minus) => {
                self.lx.next();
                negate = true;
            }
            Some(Tok::Plus) => {
                self.lx.next();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.lx.peek() {
                Some(Tok::Plus) => {
                    self.lx.next();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.lx.next();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            match self.lx.peek() {
                Some(Tok::Star) => {
                    self.lx.next();
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                // juxtaposition: "3x", "2(x+y)"
                Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.lx.peek() {
            self.lx.next();
            match self.lx.next() {
                Some(Tok::Int(n)) => {
                    let exp: u32 = n.try_into().map_err(|_| Error::Parse {
                        position: self.lx.here(),
                        message: "exponent too large".into(),
                    })?;
                    Ok(base.pow(exp))
                }
                Some(Tok::Minus) => Err(Error::NegativeExponent),
                _ => self.err("expected integer exponent after `^`"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.lx.next() {
            Some(Tok::Int(n)) => {
                // rational literal "a/b" binds tighter than multiplication
                if let Some(Tok::Slash) = self.lx.peek() {
                    self.lx.next();
                    match self.lx.next() {
                        Some(Tok::Int(d)) => {
                            if d == BigInt::from(0) {
                                return self.err("division by zero in rational literal");
                            }
                            Ok(Polynomial::constant(self.dim, Rat::new(n, d)))
                        }
                        _ => self.err("expected integer after `/`"),
                    }
                } else {
                    Ok(Polynomial::constant(self.dim, Rat::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => match self.vars.iter().position(|v| *v == name) {
                Some(j) => Ok(Polynomial::variable(self.dim, j)),
                None => Err(Error::UnknownVariable(name)),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.lx.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => self.err("expected `)`"),
                }
            }
            Some(Tok::Minus) => {
                // unary minus inside a subexpression, e.g. "(-x + y)"
                let f = self.factor()?;
                Ok(f.neg())
            }
            other => self.err(format!("expected a factor, found {other:?}")),
        }
    }
}

/// Parse `text` into the canonical [`Polynomial`] over the given variables.
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial> {
    let toks = lex(text)?;
    let mut p = Parser {
        lx: Lexer { toks, pos: 0 },
        vars,
        dim: vars.len(),
    };
    let poly = p.expr()?;
    if p.lx.pos != p.lx.toks.len() {
        return p.err("trailing input");
    }
    Ok(poly)
}

#[allow(dead_code)]
fn exponent_of(entries: &[u32]) -> Exponent {
    Exponent::new(entries.to_vec())
}
