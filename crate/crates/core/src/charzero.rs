//! Characteristic zero: logarithms and flows of unipotent maps, preimages
//! under `N` and `D`, and canonical forms in dimensions up to three.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Certificate, Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{solve_adaptive, weights_for, Echelon};
use crate::plane::{self, normalize_second_row, strip_first_row, SecondRow};
use crate::poly::{univariate, Monomial, Polynomial};
use crate::torus;
use crate::trimap::{format_components, parse_components, Order, TriangularMap};
use crate::witness::{ClassLabel, ClassReport, Group, Tracker};

/// A triangular derivation: `D(x_i)` lies in `k[x_{i+1}, ..., x_n]`, which
/// makes `D` locally nilpotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    field: Field,
    images: Vec<Polynomial>,
}

impl Derivation {
    pub fn new(field: Field, images: Vec<Polynomial>) -> Result<Self> {
        require_char_zero(field, "derivation")?;
        let n = images.len();
        for (i, g) in images.iter().enumerate() {
            if g.field() != field {
                return Err(Error::FieldMismatch);
            }
            if g.nvars() != n {
                return Err(Error::ArityMismatch { expected: n, found: g.nvars() });
            }
            if !g.involves_only_from(i + 1) {
                return Err(Error::NotTriangular { row: i + 1, reason: format!("D(x{}) involves x1..x{}", i + 1, i + 1) });
            }
        }
        Ok(Derivation { field, images })
    }

    pub fn zero(field: Field, n: usize) -> Self {
        Derivation { field, images: vec![Polynomial::zero(field, n); n] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    /// `D(x_1), ..., D(x_n)`.
    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Polynomial::is_zero)
    }

    /// `D(g) = Σ D(x_i) ∂g/∂x_i`.
    pub fn apply(&self, g: &Polynomial) -> Result<Polynomial> {
        if g.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if g.nvars() != self.nvars() {
            return Err(Error::ArityMismatch { expected: self.nvars(), found: g.nvars() });
        }
        let mut out = Polynomial::zero(self.field, self.nvars());
        for (i, d) in self.images.iter().enumerate() {
            if !d.is_zero() && g.degree_in(i).is_some_and(|e| e > 0) {
                out = out.add(&d.mul(&g.derivative(i)));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, t: &Scalar) -> Derivation {
        Derivation { field: self.field, images: self.images.iter().map(|g| g.scale(t)).collect() }
    }

    /// `Σ_{j≥0} c_j D^j(g)` for the coefficient sequence `c`, stopping when
    /// `D^j(g)` vanishes.
    fn series(&self, g: &Polynomial, coeff: impl Fn(u64) -> Scalar) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.field, self.nvars());
        let mut cur = g.clone();
        let mut j = 0;
        while !cur.is_zero() {
            out = out.add(&cur.scale(&coeff(j)));
            cur = self.apply(&cur)?;
            j += 1;
        }
        Ok(out)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_components(self.field, &self.images))
    }
}

impl FromStr for Derivation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (field, images) = parse_components(s)?;
        Derivation::new(field, images)
    }
}

fn require_char_zero(field: Field, op: &'static str) -> Result<()> {
    match field {
        Field::Rationals => Ok(()),
        Field::Prime(_) => Err(Error::CharP { op }),
    }
}

fn require_unipotent(f: &TriangularMap, op: &'static str) -> Result<()> {
    require_char_zero(f.field(), op)?;
    if !f.is_strictly_triangular() {
        return Err(Error::NotUnipotent);
    }
    Ok(())
}

fn rational(num: i64, den: u64) -> Scalar {
    Scalar::Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

fn inv_factorial(j: u64) -> Scalar {
    let f: BigInt = (1..=j).map(BigInt::from).product();
    Scalar::Q(BigRational::new(BigInt::from(1), f))
}

/// The derivation `D = log F`, with `D(x_i) = Σ_{j≥1} (-1)^(j+1) N^j(x_i) / j`.
pub fn log_map(f: &TriangularMap) -> Result<Derivation> {
    require_unipotent(f, "log_map")?;
    let n = f.nvars();
    let field = f.field();
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Polynomial::zero(field, n);
        let mut cur = f.op_n(&Polynomial::var(field, n, i))?;
        let mut j: i64 = 1;
        while !cur.is_zero() {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&cur.scale(&rational(sign, j as u64)));
            cur = f.op_n(&cur)?;
            j += 1;
        }
        images.push(acc);
    }
    Derivation::new(field, images)
}

/// `exp D`, with `x_i ↦ Σ_j D^j(x_i) / j!`.
pub fn exp_derivation(d: &Derivation) -> Result<TriangularMap> {
    let n = d.nvars();
    let comps = (0..n)
        .map(|i| d.series(&Polynomial::var(d.field, n, i), inv_factorial))
        .collect::<Result<Vec<_>>>()?;
    TriangularMap::from_components(d.field, comps)
}

/// `F^t = exp(t log F)` for rational `t`.
pub fn pow_fractional(f: &TriangularMap, t: &BigRational) -> Result<TriangularMap> {
    let d = log_map(f)?;
    exp_derivation(&d.scale(&Scalar::Q(t.clone())))
}

/// Which operator a preimage is taken under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreimageOperator {
    /// `N = F - I`.
    N,
    /// `D = log F`.
    D,
}

impl FromStr for PreimageOperator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" => Ok(PreimageOperator::N),
            "d" => Ok(PreimageOperator::D),
            other => Err(Error::UnsupportedInput(format!("unknown operator '{other}'"))),
        }
    }
}

fn solve_d(f: &TriangularMap, d: &Derivation, target: &Polynomial) -> Result<Polynomial> {
    let n = f.nvars();
    let field = f.field();
    if let Some(c) = d.images[n - 1].as_constant().filter(|c| !c.is_zero()) {
        // With D(s) = 1: h = Σ_j (-1)^j s^(j+1) D^j(t) / (j+1)!.
        let s = Polynomial::var(field, n, n - 1).scale(&c.inv()?);
        let mut h = Polynomial::zero(field, n);
        let mut cur = target.clone();
        let mut s_pow = s.clone();
        let mut j: u64 = 0;
        while !cur.is_zero() {
            let c = inv_factorial(j + 1);
            let c = if j.is_multiple_of(2) { c } else { c.neg() };
            h = h.add(&s_pow.mul(&cur).scale(&c));
            cur = d.apply(&cur)?;
            s_pow = s_pow.mul(&s);
            j += 1;
        }
        return Ok(h);
    }
    let weights = weights_for(f)?;
    let start = target.weighted_degree(weights.as_slice()).unwrap_or(0) + weights.max();
    let op = |g: &Polynomial| d.apply(g);
    match solve_adaptive(&op, target, weights, 0, start, &|x| 2 * x)? {
        Ok(h) => Ok(h),
        Err(degree) => Err(Error::no_solution(Certificate::TruncationExhausted { degree: degree as usize })),
    }
}

/// Turns `D(g) = t` into `N(h) = t`. Since `N = D φ(D)` with
/// `φ(D) = Σ_k D^k / (k+1)!`, `h = φ(D)^{-1} g`, expanded as a Neumann series
/// in the nilpotent `φ(D) - 1`.
fn d_to_n(d: &Derivation, g: &Polynomial) -> Result<Polynomial> {
    let x = |p: &Polynomial| -> Result<Polynomial> {
        let dp = d.apply(p)?;
        d.series(&dp, |j| inv_factorial(j + 2))
    };
    let mut h = Polynomial::zero(d.field, d.nvars());
    let mut term = g.clone();
    while !term.is_zero() {
        h = h.add(&term);
        term = x(&term)?.neg();
    }
    Ok(h)
}

/// A preimage of `target` under `N = F - I` or `D = log F` for unipotent `F`,
/// normalized to have no constant term.
pub fn solve_preimage_char0(f: &TriangularMap, target: &Polynomial, op: PreimageOperator) -> Result<Polynomial> {
    require_unipotent(f, "solve_preimage_char0")?;
    if target.field() != f.field() {
        return Err(Error::FieldMismatch);
    }
    if target.nvars() != f.nvars() {
        return Err(Error::ArityMismatch { expected: f.nvars(), found: target.nvars() });
    }
    let d = log_map(f)?;
    let g = solve_d(f, &d, target)?;
    let h = match op {
        PreimageOperator::D => g,
        PreimageOperator::N => d_to_n(&d, &g)?,
    };
    // Preimages are determined up to invariants; constants always are, so
    // report the one vanishing at the origin.
    let h = h.sub(&Polynomial::constant(h.field(), h.nvars(), h.coefficient(&Monomial::one(h.nvars()))));
    let check = match op {
        PreimageOperator::D => d.apply(&h)?,
        PreimageOperator::N => f.op_n(&h)?,
    };
    if &check != target {
        return Err(Error::UnsupportedInput("internal: preimage does not verify".into()));
    }
    Ok(h)
}

/// Conjugates a unipotent map with `f_n ∈ k*` to `(x_1, ..., x_{n-1}, x_n + f_n)`.
pub fn conjugate_to_translation_char0(f: &TriangularMap) -> Result<ClassReport> {
    require_unipotent(f, "conjugate_to_translation_char0")?;
    let n = f.nvars();
    if f.tail(n - 1).is_zero() {
        return Err(Error::LastComponentNotUnit);
    }
    let mut t = Tracker::new(f);
    to_translation(&mut t)?;
    let order = if t.current.is_identity() { Order::Finite(1) } else { Order::Infinite };
    ClassReport::from_tracker(ClassLabel::Translation, t, order).checked(f)
}

fn to_translation(t: &mut Tracker) -> Result<()> {
    let n = t.current.nvars();
    for i in (0..n - 1).rev() {
        let fi = t.current.tail(i).drop_leading(i + 1)?;
        if fi.is_zero() {
            continue;
        }
        let tail = t.current.restrict_tail(i + 1)?;
        let h = solve_preimage_char0(&tail, &fi, PreimageOperator::N)?;
        t.shift_row(i, h.embed(n, i + 1))?;
    }
    Ok(())
}

/// Conjugates by `(x_i + c)` where `x_i ↦ x_i + c` acts on the tails of the
/// rows above `i` as a shift of that variable.
fn shift_variable(t: &mut Tracker, i: usize, c: Scalar) -> Result<()> {
    if c.is_zero() {
        return Ok(());
    }
    let field = t.current.field();
    let n = t.current.nvars();
    t.shift_row(i, Polynomial::constant(field, n, c))
}

/// `-a_{d-1} / (d a_d)` for the coefficients of `p` in `var`: the shift that
/// zeroes the subleading coefficient.
fn subleading_shift(p: &Polynomial, var: usize) -> Result<Option<Scalar>> {
    let cs = univariate::coeffs(p, var)?;
    let d = cs.len().saturating_sub(1);
    if d == 0 {
        return Ok(None);
    }
    let field = p.field();
    Ok(Some(cs[d - 1].neg().div(&field.from_u64(d as u64).mul(&cs[d]))?))
}

fn fixed_last_plane(t: &mut Tracker) -> Result<()> {
    let f = t.current.tail(0).clone();
    if let Some(h) = subleading_shift(&f, 1)? {
        shift_variable(t, 1, h)?;
    }
    Ok(())
}

/// Removes from every `x_2`-coefficient of `f_1` its multiple of `f_2`, using
/// `N(q x_2^(j+1)/(j+1)) = q f_2 x_2^j + (lower in x_2)`.
fn reduce_mod_f2(t: &mut Tracker) -> Result<()> {
    let field = t.current.field();
    let n = 3;
    let f2 = t.current.tail(1).clone();
    let y = Polynomial::var(field, n, 1);
    let top = t.current.tail(0).degree_in(1).unwrap_or(0);
    for j in (0..=top).rev() {
        let a = univariate::coefficients_in(t.current.tail(0), 1).remove(&j).unwrap_or_else(|| Polynomial::zero(field, n));
        let (q, _) = univariate::div_rem(&a, &f2, 2)?;
        if q.is_zero() {
            continue;
        }
        let g = q.mul(&y.pow(j as u64 + 1)).scale(&field.from_u64(j as u64 + 1).inv()?);
        t.shift_row(0, g)?;
    }
    Ok(())
}

fn rem(a: &Polynomial, m: &Polynomial) -> Result<Polynomial> {
    Ok(univariate::div_rem(a, m, 2)?.1)
}

fn fixed_last_space(t: &mut Tracker) -> Result<()> {
    let field = t.current.field();
    let n = 3;
    let f2 = t.current.tail(1).clone();
    if !f2.is_zero() {
        if let Some(s) = subleading_shift(&f2, 2)? {
            shift_variable(t, 2, s)?;
        }
        reduce_mod_f2(t)?;
        let f2 = t.current.tail(1).clone();
        let e = f2.degree_in(2).unwrap_or(0);
        if e == 0 {
            debug_assert!(t.current.tail(0).is_zero());
            return Ok(());
        }
        // Remaining freedom: x_2 ↦ x_2 + h(x_3) with h in a shrinking subspace
        // of k[x_3]/(f_2). At level j it moves the coefficient of x_2^j by
        // (j+1) r_{j+1} h; take the normal form of that coset.
        let z = |k: u32| Polynomial::monomial(field, n, Monomial::from_exponents(&[0, 0, k]), field.one());
        let mut stab: Vec<Polynomial> = (0..e).map(z).collect();
        let top = t.current.tail(0).degree_in(1).unwrap_or(0);
        for j in (0..top).rev() {
            if stab.is_empty() {
                break;
            }
            let coeffs = univariate::coefficients_in(t.current.tail(0), 1);
            let zero = Polynomial::zero(field, n);
            let upper = coeffs.get(&(j + 1)).unwrap_or(&zero);
            let here = coeffs.get(&j).unwrap_or(&zero);
            let mut ech = Echelon::new(field, n, n);
            for s in &stab {
                let img = rem(&upper.mul(s), &f2)?.scale(&field.from_u64(j as u64 + 1));
                ech.insert(img, s.clone());
            }
            let (_, pre) = ech.reduce(here);
            if !pre.is_zero() {
                let step = TriangularMap::elementary(field, n, 1, pre.neg())?;
                t.conjugate_by(step)?;
                reduce_mod_f2(t)?;
            }
            stab = ech.kernel().to_vec();
        }
        return Ok(());
    }
    // f_2 = 0: the orbit of f_1 is f_1(x_2 + h(x_3), x_3 + s).
    let f1 = t.current.tail(0).clone();
    let coeffs = univariate::coefficients_in(&f1, 1);
    if let Some((&d, lead)) = coeffs.iter().next_back() {
        if d > 0 {
            let zero = Polynomial::zero(field, n);
            let sub = coeffs.get(&(d - 1)).unwrap_or(&zero);
            let (q, _) = univariate::div_rem(sub, lead, 2)?;
            if !q.is_zero() {
                let h = q.scale(&field.from_u64(d as u64).inv()?.neg());
                t.conjugate_by(TriangularMap::elementary(field, n, 1, h)?)?;
            }
        }
    }
    let coeffs = univariate::coefficients_in(t.current.tail(0), 1);
    if let Some(a) = coeffs.values().rev().find(|a| a.degree_in(2).is_some_and(|e| e > 0)) {
        if let Some(s) = subleading_shift(a, 2)? {
            shift_variable(t, 2, s)?;
        }
    }
    Ok(())
}

/// Canonical form of a unipotent map in dimension at most three under
/// conjugation by strictly triangular maps (`Ba`) or all triangular maps
/// (`Baa`, over the rationals).
pub fn canonical_char0(f: &TriangularMap, group: Group) -> Result<ClassReport> {
    require_char_zero(f.field(), "canonical_char0")?;
    if !f.is_strictly_triangular() {
        return Err(Error::NotStrictlyTriangular);
    }
    let n = f.nvars();
    if n > 3 {
        return Err(Error::UnsupportedDimension { n });
    }
    let mut t = Tracker::new(f);
    let label = if f.is_identity() {
        ClassLabel::Identity
    } else if !f.tail(n - 1).is_zero() {
        to_translation(&mut t)?;
        ClassLabel::Translation
    } else {
        match n {
            2 => fixed_last_plane(&mut t)?,
            3 => fixed_last_space(&mut t)?,
            _ => unreachable!("a nonidentity map in one variable moves x1"),
        }
        ClassLabel::FixedLast
    };
    if group == Group::Baa {
        let s = torus::normalizing_scalars(&t.current)?;
        t.scale(s)?;
    }
    let order = if label == ClassLabel::Identity { Order::Finite(1) } else { Order::Infinite };
    ClassReport::from_tracker(label, t, order).checked(f)
}

/// Classification of `(a x + f(y), b y + c)` over the rationals up to
/// triangular conjugation: affine (`A`) when the first row reduces to `a x`,
/// otherwise sequential (`S`) with the resonant part `Σ c_d y^d`, `b^d = a`.
pub fn classify_baa2_char0(f: &TriangularMap) -> Result<ClassReport> {
    require_char_zero(f.field(), "classify_baa2_char0")?;
    plane::require_plane(f)?;
    let mut t = Tracker::new(f);
    let row = normalize_second_row(&mut t)?;
    strip_first_row(&mut t, &row)?;
    let a_is_one = t.current.unit(0).is_one();
    let label = match row {
        SecondRow::Translation if a_is_one => {
            to_translation(&mut t)?;
            ClassLabel::Affine
        }
        SecondRow::Fixed if a_is_one && !t.current.tail(0).is_zero() => {
            fixed_last_plane(&mut t)?;
            ClassLabel::Sequential
        }
        _ if t.current.tail(0).is_zero() => ClassLabel::Affine,
        _ => ClassLabel::Sequential,
    };
    let s = torus::normalizing_scalars(&t.current)?;
    t.scale(s)?;
    let order = t.current.order()?;
    ClassReport::from_tracker(label, t, order).checked(f)
}

/// Conjugacy classes of `x ↦ a x + b`: `a x` when `a ≠ 1`, else `x + 1` or
/// the identity.
pub fn classify_ga1(f: &TriangularMap) -> Result<ClassReport> {
    if f.nvars() != 1 {
        return Err(Error::UnsupportedDimension { n: f.nvars() });
    }
    let field = f.field();
    let a = f.unit(0).clone();
    let b = f.tail(0).as_constant().expect("constant tail");
    let mut t = Tracker::new(f);
    let label = if !a.is_one() {
        shift_variable(&mut t, 0, b.div(&field.one().sub(&a))?)?;
        ClassLabel::Affine
    } else if !b.is_zero() {
        t.scale(vec![b])?;
        ClassLabel::Translation
    } else {
        ClassLabel::Identity
    };
    let order = t.current.order()?;
    ClassReport::from_tracker(label, t, order).checked(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trimap::parse_map;

    #[test]
    fn neumann_conversion() {
        let f = parse_map("Q [x1 -> x1 + x2, x2 -> x2 + 1]").unwrap();
        let d = log_map(&f).unwrap();
        let g = Polynomial::var(Field::Rationals, 2, 1).pow(3);
        let dg = d.apply(&g).unwrap();
        let h = d_to_n(&d, &g).unwrap();
        assert_eq!(f.op_n(&h).unwrap(), dg);
    }
}
