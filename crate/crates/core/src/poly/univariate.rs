//! Helpers for polynomials viewed as univariate in one chosen variable.

use std::collections::BTreeMap;

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// Dense coefficient list (index = degree) of a polynomial that only
/// involves `var`.
pub fn coeffs(p: &Polynomial, var: usize) -> Result<Vec<Scalar>> {
    let deg = p.degree_in(var).unwrap_or(0) as usize;
    let mut out = vec![p.field().zero(); if p.is_zero() { 0 } else { deg + 1 }];
    for (m, c) in p.terms() {
        if m.exponents().iter().enumerate().any(|(i, &e)| i != var && e > 0) {
            return Err(Error::UnsupportedInput(format!("{p} is not univariate in x{}", var + 1)));
        }
        out[m.exponents()[var] as usize] = c.clone();
    }
    Ok(out)
}

pub fn from_coeffs(field: Field, n: usize, var: usize, cs: &[Scalar]) -> Polynomial {
    Polynomial::from_terms(
        field,
        n,
        cs.iter().enumerate().map(|(e, c)| {
            let mut exps = vec![0u32; n];
            exps[var] = e as u32;
            (Monomial::from_exponents(&exps), c.clone())
        }),
    )
}

/// Splits `p` by powers of `var`: `p = sum_e x_var^e * c_e` with `c_e` free of
/// `var`.
pub fn coefficients_in(p: &Polynomial, var: usize) -> BTreeMap<u32, Polynomial> {
    let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.exponents()[var];
        let mut exps = m.exponents().to_vec();
        exps[var] = 0;
        out.entry(e)
            .or_insert_with(|| Polynomial::zero(p.field(), p.nvars()))
            .add_term(Monomial::from_exponents(&exps), c);
    }
    out
}

/// Euclidean division in `k[x_var]`.
pub fn div_rem(a: &Polynomial, b: &Polynomial, var: usize) -> Result<(Polynomial, Polynomial)> {
    let bc = coeffs(b, var)?;
    if bc.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let mut r = coeffs(a, var)?;
    let db = bc.len() - 1;
    let lead_inv = bc[db].inv()?;
    let field = a.field();
    let mut q = vec![field.zero(); r.len().saturating_sub(db).max(1)];
    while r.len() > db {
        let top = r.len() - 1;
        let c = r[top].mul(&lead_inv);
        if !c.is_zero() {
            for (i, bi) in bc.iter().enumerate() {
                r[top - db + i] = r[top - db + i].sub(&c.mul(bi));
            }
            q[top - db] = c;
        }
        r.pop();
    }
    Ok((from_coeffs(field, a.nvars(), var, &q), from_coeffs(field, a.nvars(), var, &r)))
}

/// Monic greatest common divisor in `k[x_var]` (zero if both are zero).
pub fn gcd(a: &Polynomial, b: &Polynomial, var: usize) -> Result<Polynomial> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = div_rem(&a, &b, var)?;
        a = b;
        b = r;
    }
    Ok(match a.leading_coefficient() {
        Some(c) => a.scale(&c.inv()?),
        None => a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn q(s: &str) -> Polynomial {
        parse_polynomial(s, Field::Rationals, 2).unwrap()
    }

    #[test]
    fn division_identity() {
        let a = q("x2^5 + 3*x2^2 + 1");
        let b = q("2*x2^2 - 1");
        let (qq, r) = div_rem(&a, &b, 1).unwrap();
        assert_eq!(&(&qq * &b) + &r, a);
        assert!(r.degree_in(1).unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let g = gcd(&q("x2^2 - 1"), &q("x2^2 + 2*x2 + 1"), 1).unwrap();
        assert_eq!(g, q("x2 + 1"));
    }
}
