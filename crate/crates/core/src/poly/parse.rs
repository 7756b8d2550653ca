//! Text grammar for polynomials:
//!
//! ```text
//! poly   := ["-"] term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := number | "x" index ["^" exponent]
//! number := digits ["/" digits]
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// A character cursor that reports 1-based line/column positions.
pub(crate) struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        let before = &self.text[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse { line, column, message: message.into() }
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    pub(crate) fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        (self.pos > start).then(|| &self.text[start..self.pos])
    }

    pub(crate) fn rest_starts_with(&mut self, pred: impl Fn(char) -> bool) -> bool {
        self.skip_ws();
        self.peek().is_some_and(pred)
    }

    /// Parses a variable `x<k>` and returns the zero-based index.
    pub(crate) fn variable(&mut self, n: usize) -> Result<usize> {
        if !self.eat('x') {
            return Err(self.error("expected a variable x<k>"));
        }
        let d = self.digits().ok_or_else(|| self.error("expected a variable index"))?;
        let k: usize = d.parse().map_err(|_| self.error("variable index out of range"))?;
        if k == 0 || k > n {
            return Err(self.error(format!("variable x{k} outside x1..x{n}")));
        }
        Ok(k - 1)
    }
}

fn number(cur: &mut Cursor<'_>) -> Result<BigRational> {
    let num = cur.digits().ok_or_else(|| cur.error("expected a number"))?;
    let num: BigInt = num.parse().expect("digits parse");
    if cur.eat('/') {
        let den = cur.digits().ok_or_else(|| cur.error("expected a denominator"))?;
        let den: BigInt = den.parse().expect("digits parse");
        if den == BigInt::from(0) {
            return Err(cur.error("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    } else {
        Ok(BigRational::from_integer(num))
    }
}

fn term(cur: &mut Cursor<'_>, field: Field, n: usize) -> Result<(Monomial, Scalar)> {
    let mut coeff = field.one();
    let mut exps = vec![0u32; n];
    loop {
        if cur.rest_starts_with(|c| c.is_ascii_digit()) {
            let q = number(cur)?;
            let s = field.from_rational(&q).map_err(|_| cur.error("denominator vanishes in this field"))?;
            coeff = coeff.mul(&s);
        } else if cur.rest_starts_with(|c| c == 'x') {
            let v = cur.variable(n)?;
            let e = if cur.eat('^') {
                let d = cur.digits().ok_or_else(|| cur.error("expected an exponent"))?;
                d.parse::<u32>().map_err(|_| cur.error("exponent too large"))?
            } else {
                1
            };
            exps[v] = exps[v].checked_add(e).ok_or_else(|| cur.error("exponent too large"))?;
        } else {
            return Err(cur.error("expected a number or a variable"));
        }
        if !cur.eat('*') {
            break;
        }
    }
    Ok((Monomial::from_exponents(&exps), coeff))
}

/// Parses the polynomial grammar at the cursor, stopping before any token
/// that cannot continue it (such as `,` or `]`).
pub(crate) fn polynomial_at(cur: &mut Cursor<'_>, field: Field, n: usize) -> Result<Polynomial> {
    let mut out = Polynomial::zero(field, n);
    let mut negate = cur.eat('-');
    loop {
        let (m, c) = term(cur, field, n)?;
        out.add_term(m, &if negate { c.neg() } else { c });
        if cur.eat('+') {
            negate = false;
        } else if cur.eat('-') {
            negate = true;
        } else {
            break;
        }
    }
    Ok(out)
}

/// Parses a polynomial in `x1..xn` over `field`.
pub fn parse_polynomial(text: &str, field: Field, n: usize) -> Result<Polynomial> {
    let mut cur = Cursor::new(text);
    let p = polynomial_at(&mut cur, field, n)?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(p)
}
