//! Sparse multivariate polynomials with exact coefficients.
//!
//! Monomials are ordered lexicographically with `x1 >> x2 >> ... >> xn`, and
//! a polynomial iterates its terms from the largest monomial down.

pub(crate) mod parse;
pub mod univariate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::limits;

pub use parse::parse_polynomial;

/// An exponent vector. The derived ordering is lexicographic with the first
/// variable most significant, which is exactly the monomial order we want.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(SmallVec::from_elem(0, n))
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut m = Self::one(n);
        m.0[i] = 1;
        m
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn weighted_degree(&self, weights: &[u64]) -> u64 {
        self.0.iter().zip(weights).map(|(&e, &w)| e as u64 * w).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(self.0.iter()).map(|(a, b)| a - b).collect())
    }

    /// Index of the first variable that occurs, if any.
    pub fn first_var(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// A polynomial in `n` variables over a [`Field`]. No stored coefficient is
/// zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: Field,
    n: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(field: Field, n: usize) -> Self {
        Polynomial { field, n, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, n: usize, c: Scalar) -> Self {
        Self::monomial(field, n, Monomial::one(n), c)
    }

    pub fn one(field: Field, n: usize) -> Self {
        Self::constant(field, n, field.one())
    }

    /// The variable `x_{i+1}` (zero-based index `i`).
    pub fn var(field: Field, n: usize, i: usize) -> Self {
        Self::monomial(field, n, Monomial::var(n, i), field.one())
    }

    pub fn monomial(field: Field, n: usize, m: Monomial, c: Scalar) -> Self {
        debug_assert_eq!(m.nvars(), n);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { field, n, terms }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and
    /// dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Scalar)>>(field: Field, n: usize, terms: I) -> Self {
        let mut p = Self::zero(field, n);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// The constant value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.coefficient(&Monomial::one(self.n)))
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::ArityMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// Checked ring operation.
    pub fn arith(&self, other: &Polynomial, op: ArithOp) -> Result<Polynomial> {
        self.check_compatible(other)?;
        Ok(match op {
            ArithOp::Add => self.add(other),
            ArithOp::Sub => self.sub(other),
            ArithOp::Mul => self.mul(other),
        })
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert!(self.check_compatible(other).is_ok());
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c);
        }
        big
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            field: self.field,
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.neg());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert!(self.check_compatible(other).is_ok());
        let mut out = Polynomial::zero(self.field, self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.field, self.n);
        }
        Polynomial {
            field: self.field,
            n: self.n,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.field, self.n);
        }
        Polynomial {
            field: self.field,
            n: self.n,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.mul(c))).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.field, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The lex-greatest monomial with its coefficient.
    pub fn leading_term(&self) -> Result<(Monomial, Scalar)> {
        self.terms
            .iter()
            .next_back()
            .map(|(m, c)| (m.clone(), c.clone()))
            .ok_or(Error::ZeroPolynomial)
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.terms.values().next_back()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn weighted_degree(&self, weights: &[u64]) -> Option<u64> {
        self.terms.keys().map(|m| m.weighted_degree(weights)).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponents()[var]).max()
    }

    /// True when only variables with index `>= first` occur.
    pub fn involves_only_from(&self, first: usize) -> bool {
        self.terms.keys().all(|m| m.exponents()[..first].iter().all(|&e| e == 0))
    }

    /// Variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.terms.keys().any(|m| m.exponents()[i] > 0)).collect()
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.field, self.n);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut exps: SmallVec<[u32; 4]> = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), &c.mul(&self.field.from_u64(e as u64)));
        }
        out
    }

    /// Multiplies every coefficient by a scalar map, e.g. for torus actions.
    pub fn map_coefficients<F: FnMut(&Monomial, &Scalar) -> Scalar>(&self, mut f: F) -> Polynomial {
        Polynomial::from_terms(self.field, self.n, self.terms.iter().map(|(m, c)| (m.clone(), f(m, c))))
    }

    /// Re-expresses a polynomial in the trailing `n - k` variables as a
    /// polynomial in `n - k` variables. Fails if a dropped variable occurs.
    pub fn drop_leading(&self, k: usize) -> Result<Polynomial> {
        if !self.involves_only_from(k) {
            return Err(Error::ArityMismatch { expected: self.n - k, found: self.n });
        }
        Ok(Polynomial {
            field: self.field,
            n: self.n - k,
            terms: self.terms.iter().map(|(m, c)| (Monomial::from_exponents(&m.exponents()[k..]), c.clone())).collect(),
        })
    }

    /// Embeds into `total` variables, placing ours at `offset..offset+n`.
    pub fn embed(&self, total: usize, offset: usize) -> Polynomial {
        assert!(offset + self.n <= total);
        Polynomial {
            field: self.field,
            n: total,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e: SmallVec<[u32; 4]> = SmallVec::from_elem(0, total);
                    e[offset..offset + self.n].copy_from_slice(m.exponents());
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Division by a single polynomial with respect to the lex order:
    /// returns `(q, r)` with `self = q * d + r` and no term of `r` divisible by
    /// the leading monomial of `d`. The remainder is zero exactly when `d`
    /// divides `self`.
    pub fn div_rem_by(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let (dm, dc) = d.leading_term().map_err(|_| Error::DivisionByZero)?;
        let dinv = dc.inv()?;
        let mut q = Polynomial::zero(self.field, self.n);
        let mut r = Polynomial::zero(self.field, self.n);
        let mut rest = self.clone();
        while let Ok((m, c)) = rest.leading_term() {
            if dm.divides(&m) {
                let qm = dm.quotient_of(&m);
                let qc = c.mul(&dinv);
                rest = rest.sub(&d.mul_monomial(&qm, &qc));
                q.add_term(qm, &qc);
            } else {
                let t = Polynomial::monomial(self.field, self.n, m, c);
                rest = rest.sub(&t);
                r = r.add(&t);
            }
        }
        Ok((q, r))
    }

    /// Evaluates at a point of the coefficient field.
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, found: point.len() });
        }
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = t.mul(&x.pow_u64(e as u64));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// `g(images_1, ..., images_n)`, evaluated by nested Horner schemes over
    /// the variables in order. Powers of each image are cached.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, found: images.len() });
        }
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        let (field, m) = (first.field, first.n);
        for img in images {
            if img.field != self.field || img.field != field {
                return Err(Error::FieldMismatch);
            }
            if img.n != m {
                return Err(Error::ArityMismatch { expected: m, found: img.n });
            }
        }
        let terms: Vec<(&Monomial, &Scalar)> = self.terms.iter().rev().collect();
        let mut cache = PowerCache { images, powers: HashMap::new() };
        if terms.is_empty() {
            return Ok(Polynomial::zero(field, m));
        }
        horner(&terms, 0, &mut cache)
    }
}

struct PowerCache<'a> {
    images: &'a [Polynomial],
    powers: HashMap<(usize, u32), Polynomial>,
}

impl PowerCache<'_> {
    fn get(&mut self, var: usize, e: u32) -> Polynomial {
        if let Some(p) = self.powers.get(&(var, e)) {
            return p.clone();
        }
        let p = self.images[var].pow(e as u64);
        self.powers.insert((var, e), p.clone());
        p
    }
}

fn horner(terms: &[(&Monomial, &Scalar)], var: usize, cache: &mut PowerCache<'_>) -> Result<Polynomial> {
    let field = cache.images[0].field;
    let m = cache.images[0].n;
    if var == cache.images.len() {
        let c = terms.iter().fold(field.zero(), |acc, (_, c)| acc.add(c));
        return Ok(Polynomial::constant(field, m, c));
    }
    // Terms share their exponents before `var` and are sorted descending, so
    // equal exponents of `var` form contiguous groups in descending order.
    let mut acc: Option<(Polynomial, u32)> = None;
    let mut start = 0;
    while start < terms.len() {
        let e = terms[start].0.exponents()[var];
        let mut end = start + 1;
        while end < terms.len() && terms[end].0.exponents()[var] == e {
            end += 1;
        }
        let inner = horner(&terms[start..end], var + 1, cache)?;
        acc = Some(match acc {
            None => (inner, e),
            Some((a, prev)) => (a.mul(&cache.get(var, prev - e)).add(&inner), e),
        });
        limits::check_terms(&acc.as_ref().unwrap().0)?;
        start = end;
    }
    let (a, e) = acc.expect("non-empty group");
    let out = if e > 0 { a.mul(&cache.get(var, e)) } else { a };
    limits::check_terms(&out)?;
    Ok(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let negative = matches!(c, Scalar::Q(q) if num_traits::Signed::is_negative(q));
            let mag = if negative { c.neg() } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::sub(self, rhs)
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}
