//! Recursive-descent parser shared by field elements, series and moduli.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := 'O' '(' var ['^' int] ')' | factor ('*' factor)*
//! factor := integer | 'g' ['^' int] | var ['^' int] | '(' expr ')'
//! ```
//!
//! `var` is `t` for series and `x` for moduli; field elements have no
//! variable. Exponents may be written `t^-3` or `t^(-3)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::finite_field::FieldSpec;

/// Exponent -> packed coefficient, zeros omitted.
type Poly = BTreeMap<i64, u64>;

#[derive(Debug)]
pub(crate) struct Parsed {
    pub terms: Poly,
    pub prec: Option<i64>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a FieldSpec,
    var: Option<u8>,
    allow_negative: bool,
    prec: Option<i64>,
}

pub(crate) fn parse_series(text: &str, field: &FieldSpec) -> Result<Parsed> {
    let mut p = Parser::new(text, field, Some(b't'), true);
    let terms = p.full()?;
    Ok(Parsed {
        terms,
        prec: p.prec,
    })
}

pub(crate) fn parse_element(text: &str, field: &FieldSpec) -> Result<u64> {
    let mut p = Parser::new(text, field, None, false);
    let terms = p.full()?;
    Ok(terms.get(&0).copied().unwrap_or(0))
}

/// Modulus polynomial in `x` over `F_p`, lowest degree first.
pub(crate) fn parse_modulus(text: &str, p: u64) -> Result<Vec<u64>> {
    let prime = FieldSpec::prime(p)?;
    let mut parser = Parser::new(text, &prime, Some(b'x'), false);
    let terms = parser.full()?;
    let degree = terms.keys().next_back().copied().unwrap_or(0);
    let mut out = vec![0; degree as usize + 1];
    for (e, c) in terms {
        out[e as usize] = c;
    }
    Ok(out)
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, field: &'a FieldSpec, var: Option<u8>, allow_negative: bool) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            field,
            var,
            allow_negative,
            prec: None,
        }
    }

    fn err<T>(&self, msg: impl std::fmt::Display) -> Result<T> {
        Err(Error::parse(self.pos, msg))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn full(&mut self) -> Result<Poly> {
        if self.peek().is_none() {
            return self.err("empty input");
        }
        let out = self.expr(true)?;
        if self.peek().is_some() {
            return self.err("unexpected character");
        }
        Ok(out)
    }

    fn expr(&mut self, top: bool) -> Result<Poly> {
        let mut acc = Poly::new();
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        loop {
            if let Some(term) = self.term(top)? {
                let term = if negate { self.negate(term) } else { term };
                acc = self.add(acc, term);
            }
            if self.eat(b'+') {
                negate = false;
            } else if self.eat(b'-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    /// `None` for an `O(t^k)` term, which only updates the precision.
    fn term(&mut self, top: bool) -> Result<Option<Poly>> {
        if self.peek() == Some(b'O') {
            if !top || self.var != Some(b't') {
                return self.err("O(...) is only allowed at the top level of a series");
            }
            self.pos += 1;
            self.expect(b'(')?;
            if !self.eat(b't') {
                return self.err("expected 't' inside O(...)");
            }
            let e = if self.eat(b'^') { self.exponent()? } else { 1 };
            self.expect(b')')?;
            self.prec = Some(self.prec.map_or(e, |p| p.min(e)));
            return Ok(None);
        }
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = self.mul(&acc, &rhs);
        }
        Ok(Some(acc))
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value: u128 = match digits.parse() {
                    Ok(v) => v,
                    Err(_) => {
                        self.pos = start;
                        return self.err("integer literal too large");
                    }
                };
                Ok(self.constant(self.field.from_u128(value)))
            }
            Some(b'g') => {
                let at = self.pos;
                self.pos += 1;
                let gen = match self.field.generator() {
                    Ok(g) => g,
                    Err(_) => {
                        self.pos = at;
                        return self.err("'g' requires an extension field");
                    }
                };
                let e = if self.eat(b'^') { self.exponent()? } else { 1 };
                if e < 0 {
                    return self.err("negative powers of g are not supported");
                }
                Ok(self.constant(self.field.pow_u(gen, e as u64)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr(false)?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if Some(c) == self.var => {
                self.pos += 1;
                let e = if self.eat(b'^') { self.exponent()? } else { 1 };
                if e < 0 && !self.allow_negative {
                    return self.err("negative exponent not allowed here");
                }
                Ok(Poly::from([(e, 1)]))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.eat(b'(');
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer exponent");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: i64 = match digits.parse() {
            Ok(v) => v,
            Err(_) => {
                self.pos = start;
                return self.err("exponent too large");
            }
        };
        if paren {
            self.expect(b')')?;
        }
        Ok(if negative { -value } else { value })
    }

    fn constant(&self, c: u64) -> Poly {
        let mut out = Poly::new();
        if c != 0 {
            out.insert(0, c);
        }
        out
    }

    fn negate(&self, a: Poly) -> Poly {
        a.into_iter().map(|(e, c)| (e, self.field.neg(c))).collect()
    }

    fn add(&self, mut a: Poly, b: Poly) -> Poly {
        for (e, c) in b {
            let sum = self.field.add(a.get(&e).copied().unwrap_or(0), c);
            if sum == 0 {
                a.remove(&e);
            } else {
                a.insert(e, sum);
            }
        }
        a
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::new();
        for (&ea, &ca) in a {
            for (&eb, &cb) in b {
                let prod = Poly::from([(ea + eb, self.field.mul(ca, cb))]);
                out = self.add(out, prod);
            }
        }
        out
    }
}
