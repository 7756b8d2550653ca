//! Finite-order triangular plane automorphisms: standard forms and orders.

use crate::charp;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::plane::{self, least, make_monic, normalize_second_row, strip_first_row, SecondRow};
use crate::torus;
use crate::trimap::{lcm, Order, TriangularMap};
use crate::witness::{ClassLabel, ClassReport, ConjugationWitness, Group, Tracker};

/// Numeric data of a standard form: `m` the order of the `y`-coefficient,
/// `l` the order of the `x`-coefficient `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormParameters {
    pub m: Option<u128>,
    pub l: Option<u128>,
    pub a: Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOrderReport {
    /// One of `Affine`, `Unipotent`, `Mixed`, `Sequential`.
    pub label: ClassLabel,
    pub canonical: TriangularMap,
    pub witness: ConjugationWitness,
    pub order: Order,
    pub parameters: FormParameters,
}

impl FiniteOrderReport {
    pub fn verify(&self, input: &TriangularMap) -> Result<bool> {
        self.witness.verify(input, &self.canonical)
    }
}

fn unit_order(s: &Scalar) -> Option<u128> {
    s.multiplicative_order().map(u128::from)
}

/// Whether `g^k` is the identity exactly for `k = order` and for no proper
/// divisor of it.
fn has_exact_order(g: &TriangularMap, order: u128) -> Result<bool> {
    if !g.power_u(order)?.is_identity() {
        return Ok(false);
    }
    let mut rest = order;
    let mut q = 2;
    while rest > 1 {
        if rest.is_multiple_of(q) {
            if g.power_u(order / q)?.is_identity() {
                return Ok(false);
            }
            while rest.is_multiple_of(q) {
                rest /= q;
            }
        }
        q += 1;
    }
    Ok(true)
}

fn translation_order(field: Field) -> Option<u128> {
    match field {
        Field::Rationals => None,
        Field::Prime(p) => Some(p as u128),
    }
}

fn lcm_opt(a: Option<u128>, b: Option<u128>) -> Option<u128> {
    Some(lcm(a?, b?))
}

/// Classifies `(a x + f(y), b y + c)` into the standard forms
///
/// * `A`: `(a x, b y)`, `(a x, y + 1)` or `(x, y + 1)`;
/// * `U`: `(x + y^(p-1) f(y^p), y + 1)` of order `p^2`;
/// * `M`: `(x + f(y), b y)` with `f ∈ k[y^m]`, `m = ord b`, of order `lcm(p, m)`;
/// * `S`: `(a x + f(y), b y)` with `a ≠ 1` and `f` resonant (`b^d = a`).
///
/// For resonant `f ≠ 0` the iterates are `F^j = (a^j x + j a^(j-1) f, b^j y)`,
/// so `S` has order `lcm(p, ord b)` in characteristic `p` and infinite order
/// in characteristic zero.
///
/// With `assert_finite`, inputs of infinite order are rejected with
/// `NotFiniteOrder`; otherwise they are reported with an infinite order.
pub fn classify_finite_order_b2(f: &TriangularMap, assert_finite: bool) -> Result<FiniteOrderReport> {
    plane::require_plane(f)?;
    let field = f.field();
    let p_order = translation_order(field);
    let (la, lb) = (unit_order(f.unit(0)), unit_order(f.unit(1)));
    if assert_finite && (la.is_none() || lb.is_none()) {
        return Err(Error::NotFiniteOrder);
    }

    let mut t = Tracker::new(f);
    let row = normalize_second_row(&mut t)?;
    strip_first_row(&mut t, &row)?;
    let a = t.current.unit(0).clone();
    let resonant = !t.current.tail(0).is_zero();
    let (label, predicted) = match &row {
        SecondRow::Scaling(b) => {
            let m = unit_order(b);
            if !resonant {
                (ClassLabel::Affine, lcm_opt(la, m))
            } else if a.is_one() && field != Field::Rationals {
                (ClassLabel::Mixed, lcm_opt(p_order, m))
            } else {
                (ClassLabel::Sequential, lcm_opt(p_order, m))
            }
        }
        SecondRow::Translation => {
            if !a.is_one() {
                (ClassLabel::Affine, lcm_opt(la, p_order))
            } else {
                match field {
                    Field::Rationals => {
                        let r = crate::charzero::conjugate_to_translation_char0(&t.current)?;
                        t.witness.extend(&r.witness)?;
                        t.current = r.canonical;
                        (ClassLabel::Affine, None)
                    }
                    Field::Prime(p) => {
                        let r = charp::classify_dim2_charp(&t.current, Group::Baa)?;
                        t.witness.extend(&r.witness)?;
                        t.current = r.canonical;
                        if r.label == ClassLabel::Unipotent {
                            (ClassLabel::Unipotent, Some((p as u128) * (p as u128)))
                        } else {
                            (ClassLabel::Affine, Some(p as u128))
                        }
                    }
                }
            }
        }
        SecondRow::Fixed => {
            if !resonant {
                (ClassLabel::Affine, la)
            } else if field == Field::Rationals {
                (ClassLabel::Sequential, None)
            } else {
                (ClassLabel::Mixed, p_order)
            }
        }
    };

    if label == ClassLabel::Sequential {
        match field {
            Field::Rationals => {
                let s = torus::normalizing_scalars(&t.current)?;
                t.scale(s)?;
            }
            Field::Prime(_) => {
                make_monic(&mut t)?;
                let mut cands = Vec::new();
                for nu in field.units()? {
                    let mut c = t.clone();
                    c.scale(vec![field.one(), nu])?;
                    make_monic(&mut c)?;
                    cands.push(c);
                }
                t = least(cands);
            }
        }
    }

    let order = match predicted {
        Some(k) => {
            if !has_exact_order(&t.current, k)? {
                return Err(Error::UnsupportedInput(format!("internal: order {k} does not verify")));
            }
            Order::Finite(k)
        }
        None => {
            let o = t.current.order()?;
            if o != Order::Infinite {
                return Err(Error::UnsupportedInput(format!("internal: expected infinite order, found {o}")));
            }
            Order::Infinite
        }
    };
    if assert_finite && order == Order::Infinite {
        return Err(Error::NotFiniteOrder);
    }
    let parameters = FormParameters { m: unit_order(t.current.unit(1)), l: unit_order(&a), a };
    let report = ClassReport::from_tracker(label, t, order).checked(f)?;
    Ok(FiniteOrderReport {
        label: report.label,
        canonical: report.canonical,
        witness: report.witness,
        order: report.order,
        parameters,
    })
}
