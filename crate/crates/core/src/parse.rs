//! Text grammar for polynomials and field elements.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := power ('*' power)*
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')' | '-' atom
//! ```
//!
//! Identifiers are ring variables; `s` additionally names the adjoined root
//! of a proper extension field when no ring variable is called `s`.
//! Whitespace is ignored everywhere.

use thiserror::Error;

use crate::ff::{FieldCtx, FieldElem};
use crate::mpoly::{MPoly, PolyError, Ring, RingRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected {found} at position {pos}")]
    Unexpected { found: String, pos: usize },
    #[error("unknown identifier {0:?}")]
    UnknownIdent(String),
    #[error("{0}")]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            let mut v: u64 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(chars[i].to_digit(10).unwrap() as u64))
                    .ok_or(ParseError::Unexpected { found: "oversized integer".into(), pos: start })?;
                i += 1;
            }
            out.push((Tok::Int(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(ParseError::Unexpected { found: format!("{c:?}"), pos: i });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ring: &'a RingRef,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err_here(&self) -> ParseError {
        match self.toks.get(self.pos) {
            Some((t, p)) => ParseError::Unexpected { found: format!("{t:?}"), pos: *p },
            None => ParseError::Unexpected { found: "end of input".into(), pos: usize::MAX },
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = if self.eat('-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = acc.try_add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.try_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = acc.try_mul(&self.power()?)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MPoly, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek() {
                Some(Tok::Int(e)) => {
                    let e = u32::try_from(*e).map_err(|_| PolyError::DegreeOverflow)?;
                    self.pos += 1;
                    return Ok(base.pow(e)?);
                }
                _ => return Err(self.err_here()),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly, ParseError> {
        let field = self.ring.field().clone();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                let c = field.from_int((v % field.p() as u64) as i64);
                Ok(MPoly::constant(self.ring, c))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(p) = MPoly::var_named(self.ring, &name) {
                    Ok(p)
                } else if name == "s" && !field.is_prime_field() {
                    Ok(MPoly::constant(self.ring, field.generator()))
                } else {
                    Err(ParseError::UnknownIdent(name))
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err_here());
                }
                Ok(e)
            }
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            _ => Err(self.err_here()),
        }
    }
}

/// Parses a polynomial in `ring`.
pub fn parse_poly(ring: &RingRef, src: &str) -> Result<MPoly, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, ring };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err_here());
    }
    Ok(e)
}

/// Parses a field element such as `7`, `3+2*s` or `s^2`.
pub fn parse_elem(field: &FieldCtx, src: &str) -> Result<FieldElem, ParseError> {
    let empty: [&str; 0] = [];
    let ring = Ring::new(field.clone(), &empty)?;
    let p = parse_poly(&ring, src)?;
    p.constant_value().ok_or_else(|| ParseError::Unexpected { found: "non-constant".into(), pos: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = FieldCtx::canonical(11).unwrap();
        let r = Ring::new(f, &["x", "y", "z"]).unwrap();
        let p = parse_poly(&r, "x*y*z^3 + 2*x^5 + y^5").unwrap();
        assert_eq!(p.to_string(), "2*x^5 + y^5 + x*y*z^3");
        assert_eq!(parse_poly(&r, &p.to_string()).unwrap(), p);
        let q = parse_poly(&r, "(x^2 - 2*y^2)*z^3 - x").unwrap();
        assert_eq!(q.to_string(), "x^2*z^3 + 9*y^2*z^3 + 10*x");
    }

    #[test]
    fn extension_literals() {
        let f = FieldCtx::canonical(49).unwrap();
        assert_eq!(parse_elem(&f, "-3 - s").unwrap(), f.zeta());
        assert_eq!(parse_elem(&f, &f.format(f.zeta())).unwrap(), f.zeta());
        let r = Ring::new(f.clone(), &["x"]).unwrap();
        let p = parse_poly(&r, "(4+6*s)*x + s").unwrap();
        assert_eq!(parse_poly(&r, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn errors() {
        let f = FieldCtx::canonical(11).unwrap();
        let r = Ring::new(f, &["x"]).unwrap();
        assert!(matches!(parse_poly(&r, "x + w"), Err(ParseError::UnknownIdent(_))));
        assert!(parse_poly(&r, "x +").is_err());
        assert!(parse_poly(&r, "(x").is_err());
    }
}
