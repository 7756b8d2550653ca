//! Reduction steps shared by the two-variable classifiers: normalizing the
//! second row, removing removable parts of the first row, and comparing
//! representatives.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::poly::{Monomial, Polynomial};
use crate::trimap::TriangularMap;
use crate::witness::Tracker;

/// Shape of the second row after normalization.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SecondRow {
    /// `b y` with `b != 1`.
    Scaling(Scalar),
    /// `y + 1`.
    Translation,
    /// `y`.
    Fixed,
}

pub(crate) fn require_plane(f: &TriangularMap) -> Result<()> {
    if f.nvars() != 2 {
        return Err(Error::UnsupportedDimension { n: f.nvars() });
    }
    Ok(())
}

fn y_shift(f: &TriangularMap, s: Scalar) -> Result<TriangularMap> {
    TriangularMap::elementary(f.field(), 2, 1, Polynomial::constant(f.field(), 2, s))
}

/// Conjugates the second row `b y + c` to `b y`, `y + 1` or `y`.
pub(crate) fn normalize_second_row(t: &mut Tracker) -> Result<SecondRow> {
    let field = t.current.field();
    let b = t.current.unit(1).clone();
    let c = t.current.tail(1).as_constant().expect("last tail is constant");
    if !b.is_one() {
        if !c.is_zero() {
            let s = c.div(&field.one().sub(&b))?;
            let step = y_shift(&t.current, s)?;
            t.conjugate_by(step)?;
        }
        debug_assert!(t.current.tail(1).is_zero());
        Ok(SecondRow::Scaling(b))
    } else if !c.is_zero() {
        t.scale(vec![field.one(), c])?;
        Ok(SecondRow::Translation)
    } else {
        Ok(SecondRow::Fixed)
    }
}

/// Removes from `f_1` everything that a conjugation by `(x + g(y))` can
/// remove, given the normalized second row. For `b y` the resonant monomials
/// `y^d` with `b^d = a` survive; for the other shapes with `a != 1` all of `f_1`
/// goes away. With `a = 1` and second row `y` or `y + 1` nothing is done.
pub(crate) fn strip_first_row(t: &mut Tracker, row: &SecondRow) -> Result<()> {
    let field = t.current.field();
    let a = t.current.unit(0).clone();
    let f = t.current.tail(0).clone();
    let var_pow = |d: u32| Polynomial::monomial(field, 2, Monomial::from_exponents(&[0, d]), field.one());
    let mut g = Polynomial::zero(field, 2);
    match row {
        SecondRow::Scaling(b) => {
            for (m, c) in f.terms() {
                let d = m.exponents()[1];
                let diff = a.sub(&b.pow_u64(d as u64));
                if !diff.is_zero() {
                    g = g.add(&var_pow(d).scale(&c.neg().div(&diff)?));
                }
            }
        }
        SecondRow::Fixed => {
            if !a.is_one() {
                g = f.scale(&field.one().sub(&a).inv()?);
            }
        }
        SecondRow::Translation => {
            if !a.is_one() {
                // E(g) = a g(y) - g(y+1) preserves degree with leading factor
                // a - 1; cancel f from the top down.
                let shift = [Polynomial::var(field, 2, 0), Polynomial::var(field, 2, 1).add(&Polynomial::one(field, 2))];
                let e = |h: &Polynomial| -> Result<Polynomial> { Ok(h.scale(&a).sub(&h.substitute(&shift)?)) };
                let mut rest = f.clone();
                let lead_inv = a.sub(&field.one()).inv()?;
                while let Ok((m, c)) = rest.leading_term() {
                    let term = Polynomial::monomial(field, 2, m, c.neg().mul(&lead_inv));
                    rest = rest.add(&e(&term)?);
                    g = g.add(&term);
                }
            }
        }
    }
    t.shift_row(0, g)
}

/// Compares two polynomials as dense coefficient vectors over the union of
/// their monomials, from the largest monomial down.
pub(crate) fn cmp_dense(a: &Polynomial, b: &Polynomial) -> Ordering {
    let mut monos: Vec<&Monomial> = a.terms().map(|(m, _)| m).chain(b.terms().map(|(m, _)| m)).collect();
    monos.sort_unstable_by(|x, y| y.cmp(x));
    monos.dedup();
    for m in monos {
        let o = a.coefficient(m).canonical_cmp(&b.coefficient(m));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Total order on maps used to choose orbit representatives.
pub(crate) fn cmp_maps(a: &TriangularMap, b: &TriangularMap) -> Ordering {
    for i in 0..a.nvars() {
        let o = a.unit(i).canonical_cmp(b.unit(i)).then_with(|| cmp_dense(a.tail(i), b.tail(i)));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Picks the least representative among candidate trackers.
pub(crate) fn least(candidates: Vec<Tracker>) -> Tracker {
    candidates
        .into_iter()
        .min_by(|x, y| cmp_maps(&x.current, &y.current))
        .expect("non-empty orbit")
}

/// Scales `x` so that the leading coefficient of `f_1` becomes 1.
pub(crate) fn make_monic(t: &mut Tracker) -> Result<()> {
    let field = t.current.field();
    if let Some(c) = t.current.tail(0).leading_coefficient().cloned() {
        // (μx): f ↦ μ⁻¹ f, so μ = c.
        t.scale(vec![c, field.one()])?;
    }
    Ok(())
}
