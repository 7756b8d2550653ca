//! Sparse echelon basis of a span of polynomials, keyed by leading monomial.
//!
//! Each stored vector remembers a "preimage": the combination of inserted
//! labels that produced it. Reducing a target therefore yields both the
//! residual and a preimage of `target - residual`.
//!
//! Vectors are kept as term lists sorted by ascending monomial, so the leading
//! term is the last entry and row operations are linear merges.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::field::{Field, Scalar};
use crate::poly::{Monomial, Polynomial};

type Terms = Vec<(Monomial, Scalar)>;

fn terms_of(p: &Polynomial) -> Terms {
    p.terms().rev().map(|(m, c)| (m.clone(), c.clone())).collect()
}

fn to_poly(field: Field, n: usize, t: Terms) -> Polynomial {
    Polynomial::from_terms(field, n, t)
}

/// `a - c * b`.
fn axpy(a: &[(Monomial, Scalar)], c: &Scalar, b: &[(Monomial, Scalar)]) -> Terms {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push((b[j].0.clone(), b[j].1.mul(c).neg()));
                j += 1;
            }
            Ordering::Equal => {
                let v = a[i].1.sub(&b[j].1.mul(c));
                if !v.is_zero() {
                    out.push((a[i].0.clone(), v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Row {
    image: Terms,
    pre: Terms,
}

#[derive(Debug, Clone)]
pub struct Echelon {
    field: Field,
    image_vars: usize,
    pre_vars: usize,
    rows: HashMap<Monomial, Row>,
    kernel: Vec<Polynomial>,
}

impl Echelon {
    pub fn new(field: Field, image_vars: usize, pre_vars: usize) -> Self {
        Echelon { field, image_vars, pre_vars, rows: HashMap::new(), kernel: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Labels whose images turned out to be dependent: `pre` with image 0.
    pub fn kernel(&self) -> &[Polynomial] {
        &self.kernel
    }

    pub fn pivots(&self) -> impl Iterator<Item = &Monomial> {
        self.rows.keys()
    }

    /// Adds `image` (labelled by `pre`). Returns whether the rank grew.
    pub fn insert(&mut self, image: Polynomial, pre: Polynomial) -> bool {
        let mut image = terms_of(&image);
        let mut pre = terms_of(&pre);
        loop {
            let Some((lm, lc)) = image.last().cloned() else {
                if !pre.is_empty() {
                    self.kernel.push(to_poly(self.field, self.pre_vars, pre));
                }
                return false;
            };
            match self.rows.get(&lm) {
                Some(row) => {
                    image = axpy(&image, &lc, &row.image);
                    pre = axpy(&pre, &lc, &row.pre);
                }
                None => {
                    let inv = lc.inv().expect("nonzero leading coefficient");
                    let scale = |t: Terms| t.into_iter().map(|(m, c)| (m, c.mul(&inv))).collect();
                    self.rows.insert(lm, Row { image: scale(image), pre: scale(pre) });
                    return true;
                }
            }
        }
    }

    /// Reduces `target` against the basis. Returns `(residual, pre)` with
    /// `target = residual + image(pre)`; the residual contains no pivot
    /// monomial and is uniquely determined by the span.
    pub fn reduce(&self, target: &Polynomial) -> (Polynomial, Polynomial) {
        let mut rest = terms_of(target);
        let mut residual = Vec::new();
        let mut pre: Terms = Vec::new();
        while let Some((m, c)) = rest.last().cloned() {
            match self.rows.get(&m) {
                Some(row) => {
                    rest = axpy(&rest, &c, &row.image);
                    pre = axpy(&pre, &c.neg(), &row.pre);
                }
                None => {
                    rest.pop();
                    residual.push((m, c));
                }
            }
        }
        (to_poly(self.field, self.image_vars, residual), to_poly(self.field, self.pre_vars, pre))
    }
}
