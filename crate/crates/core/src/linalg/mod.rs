//! The weighted degree filtration attached to a triangular map, and exact
//! linear algebra for `N`, `M` and other linear operators on its finite
//! dimensional pieces.

pub mod dense;
pub mod echelon;

use std::collections::HashMap;

pub use dense::Matrix;
pub use echelon::Echelon;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::limits;
use crate::poly::{Monomial, Polynomial};
use crate::trimap::TriangularMap;

/// Degrees `deg_F(x_i)`, with the last variable of weight 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    weights: Vec<u64>,
}

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() || weights.contains(&0) || weights.last() != Some(&1) {
            return Err(Error::UnsupportedInput(format!("invalid weights {weights:?}")));
        }
        Ok(WeightVector { weights })
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.weights
    }

    pub fn degree(&self, g: &Polynomial) -> Option<u64> {
        g.weighted_degree(&self.weights)
    }

    pub fn max(&self) -> u64 {
        *self.weights.iter().max().expect("non-empty")
    }
}

/// Weights for `F`, chosen from the last variable upward: `w_n = 1` and each
/// `w_i` is the least admissible value at least the weighted degree of `f_i`
/// (a positive multiple of `p` in characteristic `p`, at least 1 otherwise).
pub fn weights_for(f: &TriangularMap) -> Result<WeightVector> {
    if !f.is_strictly_triangular() {
        return Err(Error::NotStrictlyTriangular);
    }
    let n = f.nvars();
    let p = f.field().characteristic() as u64;
    let mut w = vec![0u64; n];
    w[n - 1] = 1;
    for i in (0..n - 1).rev() {
        let d = f.tail(i).weighted_degree(&w).unwrap_or(0);
        w[i] = if p == 0 { d.max(1) } else { d.div_ceil(p).max(1) * p };
    }
    WeightVector::new(w)
}

/// Monomials of weighted degree at most `d`, optionally with `slack` extra
/// powers of the last variable for free (the space `k[x_n]_{slack} k_d`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSpace {
    weights: WeightVector,
    d: u64,
    slack: u32,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl TruncatedSpace {
    pub fn new(weights: WeightVector, d: u64) -> Result<Self> {
        Self::with_slack(weights, d, 0)
    }

    /// `V_d = k[x_n]_{slack} · k_d`.
    pub fn with_slack(weights: WeightVector, d: u64, slack: u32) -> Result<Self> {
        let basis = enumerate(&weights, d, slack)?;
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(TruncatedSpace { weights, d, slack, basis, index })
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn degree_bound(&self) -> u64 {
        self.d
    }

    pub fn slack(&self) -> u32 {
        self.slack
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis monomials in descending lex order.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.index.contains_key(m)
    }

    /// Coordinates of `g`, or `None` if `g` leaves the space.
    pub fn coordinates(&self, g: &Polynomial) -> Option<Vec<Scalar>> {
        let field = g.field();
        let mut v = vec![field.zero(); self.dim()];
        for (m, c) in g.terms() {
            v[*self.index.get(m)?] = c.clone();
        }
        Some(v)
    }

    pub fn polynomial(&self, field: crate::field::Field, coords: &[Scalar]) -> Polynomial {
        let n = self.weights.as_slice().len();
        Polynomial::from_terms(field, n, self.basis.iter().cloned().zip(coords.iter().cloned()))
    }
}

fn admitted(weights: &[u64], m: &[u32], d: u64, slack: u32) -> bool {
    let n = m.len();
    let wd: u64 = m.iter().zip(weights).map(|(&e, &w)| e as u64 * w).sum();
    wd - m[n - 1].min(slack) as u64 <= d
}

fn enumerate(weights: &WeightVector, d: u64, slack: u32) -> Result<Vec<Monomial>> {
    let w = weights.as_slice();
    let n = w.len();
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    fn rec(w: &[u64], i: usize, budget: u64, exps: &mut Vec<u32>, out: &mut Vec<Monomial>, d: u64, slack: u32) -> Result<()> {
        let n = w.len();
        if i == n - 1 {
            let max_e = budget + slack as u64;
            for e in 0..=max_e {
                exps[i] = e as u32;
                if admitted(w, exps, d, slack) {
                    out.push(Monomial::from_exponents(exps));
                }
            }
            exps[i] = 0;
            if out.len() > limits::max_dimension() {
                return Err(Error::DegreeGrowthExceeded { degree: d as usize });
            }
            return Ok(());
        }
        let mut e = 0u64;
        while e * w[i] <= budget {
            exps[i] = e as u32;
            rec(w, i + 1, budget - e * w[i], exps, out, d, slack)?;
            e += 1;
        }
        exps[i] = 0;
        Ok(())
    }
    rec(w, 0, d, &mut exps, &mut out, d, slack)?;
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

/// A linear operator on polynomials.
pub enum Operator<'a> {
    N,
    /// `M = M_1`.
    M,
    Custom(&'a dyn Fn(&Polynomial) -> Result<Polynomial>),
}

/// Matrix of an operator restricted to a truncated space; column `j` holds the
/// coordinates of the image of basis monomial `j`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    space: TruncatedSpace,
    matrix: Matrix,
}

impl OperatorMatrix {
    pub fn space(&self) -> &TruncatedSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Decodes column `j` back into a polynomial.
    pub fn image_of(&self, j: usize) -> Polynomial {
        self.space.polynomial(self.matrix.field(), &self.matrix.column(j))
    }
}

pub fn operator_matrix(f: &TriangularMap, kind: Operator<'_>, space: &TruncatedSpace) -> Result<OperatorMatrix> {
    let field = f.field();
    let n = f.nvars();
    let mut cols = Vec::with_capacity(space.dim());
    for m in space.basis() {
        let g = Polynomial::monomial(field, n, m.clone(), field.one());
        let img = match &kind {
            Operator::N => f.op_n(&g)?,
            Operator::M => f.op_m(1, &g)?,
            Operator::Custom(op) => op(&g)?,
        };
        let coords = space.coordinates(&img).ok_or_else(|| Error::NotStable { monomial: m.to_string() })?;
        cols.push(coords);
    }
    Ok(OperatorMatrix { space: space.clone(), matrix: Matrix::from_columns(field, space.dim(), &cols) })
}

/// Solution of `target = r + A h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub h: Polynomial,
    pub r: Polynomial,
}

/// Solves `A h = target`, or `target = r + A h` with `r` in the span of
/// `constraint_span` when given.
pub fn solve_linear(a: &OperatorMatrix, target: &Polynomial, constraint_span: Option<&[Polynomial]>) -> Result<LinearSolution> {
    let field = a.matrix.field();
    let n = target.nvars();
    let space = &a.space;
    let b = space
        .coordinates(target)
        .ok_or_else(|| Error::NotStable { monomial: target.to_string() })?;
    let constraints = constraint_span.unwrap_or(&[]);
    let ccols = constraints
        .iter()
        .map(|c| space.coordinates(c).ok_or_else(|| Error::NotStable { monomial: c.to_string() }))
        .collect::<Result<Vec<_>>>()?;
    let cm = Matrix::from_columns(field, space.dim(), &ccols);
    let full = cm.hcat(&a.matrix);
    let x = full.solve(&b).ok_or_else(|| {
        Error::no_solution(crate::error::Certificate::TruncationExhausted { degree: space.degree_bound() as usize })
    })?;
    let k = constraints.len();
    let mut r = Polynomial::zero(field, n);
    for (c, y) in constraints.iter().zip(&x[..k]) {
        r = r.add(&c.scale(y));
    }
    let h = space.polynomial(field, &x[k..]);
    Ok(LinearSolution { h, r })
}

/// Incrementally grown sparse echelon of `op(V_d)` for nested spaces `V_d`.
pub struct ImageSolver<'a> {
    op: &'a dyn Fn(&Polynomial) -> Result<Polynomial>,
    weights: WeightVector,
    slack: u32,
    field: crate::field::Field,
    n: usize,
    degree: Option<u64>,
    echelon: Echelon,
}

impl<'a> ImageSolver<'a> {
    pub fn new(op: &'a dyn Fn(&Polynomial) -> Result<Polynomial>, field: crate::field::Field, weights: WeightVector, slack: u32) -> Self {
        let n = weights.as_slice().len();
        ImageSolver { op, weights, slack, field, n, degree: None, echelon: Echelon::new(field, n, n) }
    }

    pub fn degree(&self) -> Option<u64> {
        self.degree
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    /// Extends the domain to `V_d`.
    pub fn grow_to(&mut self, d: u64) -> Result<()> {
        if self.degree.is_some_and(|old| old >= d) {
            return Ok(());
        }
        let w = self.weights.as_slice().to_vec();
        let old = self.degree;
        for m in enumerate(&self.weights, d, self.slack)?.into_iter().rev() {
            if old.is_some_and(|o| admitted(&w, m.exponents(), o, self.slack)) {
                continue;
            }
            let g = Polynomial::monomial(self.field, self.n, m, self.field.one());
            let img = (self.op)(&g)?;
            limits::check_terms(&img)?;
            self.echelon.insert(img, g);
        }
        self.degree = Some(d);
        Ok(())
    }

    /// `(residual, preimage)` with `target = residual + op(preimage)`.
    pub fn reduce(&self, target: &Polynomial) -> (Polynomial, Polynomial) {
        self.echelon.reduce(target)
    }
}

/// Degree schedule for adaptive solves: start at `start`, grow by `next`, at
/// most `limits::max_degree_growth()` times. Returns the preimage, or the last
/// degree whose truncation was fully searched when the schedule or the
/// dimension budget ran out.
pub fn solve_adaptive(
    op: &dyn Fn(&Polynomial) -> Result<Polynomial>,
    target: &Polynomial,
    weights: WeightVector,
    slack: u32,
    start: u64,
    next: &dyn Fn(u64) -> u64,
) -> Result<std::result::Result<Polynomial, u64>> {
    let mut solver = ImageSolver::new(op, target.field(), weights, slack);
    let mut d = start;
    let mut searched = 0;
    for step in 0..=limits::max_degree_growth() {
        match solver.grow_to(d) {
            Ok(()) => {}
            Err(Error::DegreeGrowthExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
        searched = d;
        let (res, pre) = solver.reduce(target);
        if res.is_zero() {
            return Ok(Ok(pre));
        }
        if step == limits::max_degree_growth() {
            break;
        }
        d = next(d);
    }
    Ok(Err(searched))
}
