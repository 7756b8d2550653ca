//! Positive characteristic: maximal-order maps, their invariants, the image of
//! `N`, representatives modulo that image, and the resulting canonical forms.

use crate::error::{Certificate, Error, Result};
use crate::field::Field;
use crate::linalg::{solve_adaptive, weights_for, Echelon, ImageSolver, TruncatedSpace};
use crate::limits;
use crate::plane::{self, least, make_monic, normalize_second_row, strip_first_row, SecondRow};
use crate::poly::{Monomial, Polynomial};
use crate::trimap::{Order, TriangularMap};
use crate::witness::{ClassLabel, ClassReport, Group, Tracker};

/// Invariants `x̃_i = x_i^p - a_i^(p-1) x_i + b_i` of a maximal-order map.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet {
    pub generators: Vec<Polynomial>,
    /// `(a_i, b_i)` per index.
    pub shape: Vec<(Polynomial, Polynomial)>,
}

/// `g = r + N(h)` with `r` in the span of `x_n^(p-1) x^(p α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub r: Polynomial,
    pub h: Polynomial,
    /// False when the representatives reachable on the final truncation are
    /// linearly dependent modulo the image, so `r` was one of several choices.
    pub unique: bool,
}

fn characteristic(f: &TriangularMap, op: &'static str) -> Result<u32> {
    match f.field() {
        Field::Rationals => Err(Error::CharZero { op }),
        Field::Prime(p) => Ok(p),
    }
}

/// Whether `F` has order `p^n`.
pub fn is_max_order(f: &TriangularMap) -> Result<bool> {
    let p = characteristic(f, "is_max_order")?;
    if !f.is_strictly_triangular() {
        return Err(Error::NotStrictlyTriangular);
    }
    // Without a translation in the last row the order is at most p^(n-1).
    if f.tail(f.nvars() - 1).is_zero() {
        return Ok(false);
    }
    Ok(f.order_charp()? == (p as u128).pow(f.nvars() as u32))
}

fn require_max_order(f: &TriangularMap) -> Result<u32> {
    let p = characteristic(f, "maximal-order operation")?;
    if !is_max_order(f)? {
        return Err(Error::NotMaxOrder);
    }
    Ok(p)
}

/// The `x_i` increment of `(F restricted to coordinates i..n)^(p^(n-1-i))`.
fn increment(f: &TriangularMap, i: usize, p: u32) -> Result<Polynomial> {
    let n = f.nvars();
    let t = f.restrict_tail(i)?;
    let q = (p as u128).pow((n - 1 - i) as u32);
    Ok(t.power_u(q)?.tail(0).embed(n, i))
}

/// Generators of the invariant ring of a maximal-order map.
pub fn invariant_generators(f: &TriangularMap) -> Result<InvariantSet> {
    let p = require_max_order(f)?;
    let n = f.nvars();
    let field = f.field();
    let mut generators = vec![Polynomial::zero(field, n); n];
    let mut shape = vec![(Polynomial::zero(field, n), Polynomial::zero(field, n)); n];
    for i in (0..n).rev() {
        let xi = Polynomial::var(field, n, i);
        let gi = increment(f, i, p)?;
        let gpow = gi.pow(p as u64 - 1);
        let x_prime = xi.pow(p as u64).sub(&gpow.mul(&xi));
        let fi = f.tail(i);
        let target = fi.pow(p as u64).sub(&gpow.mul(fi));
        let h = if i + 1 == n || target.is_zero() {
            Polynomial::zero(field, n)
        } else {
            let tail = f.restrict_tail(i + 1)?;
            let t = target.neg().drop_leading(i + 1)?;
            match preimage(&tail, &t) {
                Ok(h) => h.embed(n, i + 1),
                Err(Error::NoSolution { certificate }) => return Err(Error::InternalNoSolution { row: i + 1, certificate }),
                Err(e) => return Err(e),
            }
        };
        generators[i] = x_prime.add(&h);
        shape[i] = (gi, h);
    }
    Ok(InvariantSet { generators, shape })
}

/// `Σ_{j<q} F^j(g)` where `q` is the order of `F`.
fn full_orbit_sum(f: &TriangularMap, g: &Polynomial) -> Result<Polynomial> {
    let p = characteristic(f, "orbit sum")?;
    let q = f.order_charp()?;
    f.orbit_sum(p as u128, ilog(q, p as u128), g)
}

fn ilog(mut q: u128, p: u128) -> u32 {
    let mut m = 0;
    while q > 1 {
        q /= p;
        m += 1;
    }
    m
}

/// `h` with `N(h) = g`, given `u` with `Σ_{j<q} F^j(u) = 1`, `F^q = I` and
/// `Σ_{j<q} F^j(g) = 0`: `h = -Σ_j P_j F^j(u)` with `P_j = Σ_{i<j} F^i(g)`.
pub(crate) fn homotopy_preimage(f: &TriangularMap, q: u128, u: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    let comps = f.components();
    let mut partial = Polynomial::zero(f.field(), f.nvars());
    let mut gj = g.clone();
    let mut uj = u.clone();
    let mut h = Polynomial::zero(f.field(), f.nvars());
    for j in 0..q {
        if j > 0 {
            h = h.sub(&partial.mul(&uj));
        }
        partial = partial.add(&gj);
        if j + 1 < q {
            gj = gj.substitute(&comps)?;
            uj = uj.substitute(&comps)?;
        }
        limits::check_terms(&h)?;
    }
    Ok(h)
}

/// Looks for `u = c · x_k^(p-1) ... x_n^(p-1)` with full orbit sum 1.
fn orbit_slice(f: &TriangularMap) -> Result<Option<Polynomial>> {
    let p = characteristic(f, "orbit slice")?;
    let n = f.nvars();
    let field = f.field();
    for k in (0..n).rev() {
        let mut exps = vec![0u32; n];
        for e in &mut exps[k..] {
            *e = p - 1;
        }
        let u = Polynomial::monomial(field, n, Monomial::from_exponents(&exps), field.one());
        let s = full_orbit_sum(f, &u)?;
        if let Some(c) = s.as_constant() {
            if !c.is_zero() {
                return Ok(Some(u.scale(&c.inv()?)));
            }
        }
    }
    Ok(None)
}

/// If `F^(q/p)` moves a single coordinate by `γ`, returns `(i, γ)`.
fn top_translation(f: &TriangularMap, p: u32) -> Result<Option<(usize, Polynomial)>> {
    let q = f.order_charp()?;
    if q < p as u128 {
        return Ok(None);
    }
    let l = f.power_u(q / p as u128)?;
    let moved: Vec<usize> = (0..f.nvars()).filter(|&i| !l.tail(i).is_zero()).collect();
    Ok(match moved.as_slice() {
        [i] => Some((*i, l.tail(*i).clone())),
        _ => None,
    })
}

fn start_degree(weights: &[u64], target: &Polynomial, p: u64) -> u64 {
    let d = target.weighted_degree(weights).unwrap_or(0) + weights.iter().max().copied().unwrap_or(1);
    // Round up to d ≡ p - 1 (mod p).
    d + (p - 1 + p - d % p) % p
}

/// Preimage under `N` for any strictly triangular map of finite order.
pub(crate) fn preimage(f: &TriangularMap, target: &Polynomial) -> Result<Polynomial> {
    let p = characteristic(f, "solve_N_preimage")?;
    if target.is_zero() {
        return Ok(Polynomial::zero(f.field(), f.nvars()));
    }
    let q = f.order_charp()?;
    let m = full_orbit_sum(f, target)?;
    if !m.is_zero() {
        return Err(Error::no_solution(Certificate::MNonzero(m)));
    }
    if let Some(u) = orbit_slice(f)? {
        let h = homotopy_preimage(f, q, &u, target)?;
        debug_assert_eq!(&f.op_n(&h)?, target);
        return Ok(h);
    }
    if let Some((i, gamma)) = top_translation(f, p)? {
        let s = f.orbit_sum(p as u128, ilog(q, p as u128) - 1, target)?;
        let (_, r) = s.div_rem_by(&gamma)?;
        if !r.is_zero() {
            return Err(Error::no_solution(Certificate::TranslationResidue { index: i, residue: r }));
        }
    }
    let weights = weights_for(f)?;
    let start = start_degree(weights.as_slice(), target, p as u64);
    let op = |h: &Polynomial| f.op_n(h);
    let next = |d: u64| p as u64 * (d + 1) - 1;
    match solve_adaptive(&op, target, weights, p - 1, start, &next)? {
        Ok(h) => Ok(h),
        Err(degree) => Err(Error::no_solution(Certificate::TruncationExhausted { degree: degree as usize })),
    }
}

/// A preimage of `target` under `N = F - I` for a maximal-order map, or
/// `NoSolution` with a certificate (`M(target) != 0` whenever that is the
/// reason).
pub fn solve_n_preimage(f: &TriangularMap, target: &Polynomial) -> Result<Polynomial> {
    require_max_order(f)?;
    if target.field() != f.field() {
        return Err(Error::FieldMismatch);
    }
    preimage(f, target)
}

/// A preimage of `target` under `M = M_1` for a maximal-order map. The image
/// of `M` consists of invariants, so a target moved by `F` is rejected with
/// its `N`-image as certificate.
pub fn solve_m_preimage(f: &TriangularMap, target: &Polynomial) -> Result<Polynomial> {
    let p = require_max_order(f)?;
    if target.field() != f.field() {
        return Err(Error::FieldMismatch);
    }
    let moved = f.op_n(target)?;
    if !moved.is_zero() {
        return Err(Error::no_solution(Certificate::NotInvariant(moved)));
    }
    let weights = weights_for(f)?;
    let w = weights.as_slice().to_vec();
    // M lowers weighted degree by about (p^n - 1) times the smallest step, so
    // start above the target by one full orbit in the top variable.
    let start = start_degree(&w, target, p as u64) + p as u64 * weights.max();
    let op = |h: &Polynomial| f.op_m(1, h);
    let next = |d: u64| p as u64 * (d + 1) - 1;
    match solve_adaptive(&op, target, weights, p - 1, start, &next)? {
        Ok(h) => Ok(h),
        Err(degree) => Err(Error::no_solution(Certificate::TruncationExhausted { degree: degree as usize })),
    }
}

fn is_representative(m: &Monomial, p: u32) -> bool {
    let e = m.exponents();
    let n = e.len();
    e[n - 1] % p == p - 1 && e[..n - 1].iter().all(|&x| x % p == 0)
}

pub(crate) fn split_any(f: &TriangularMap, g: &Polynomial) -> Result<SplitResult> {
    let p = characteristic(f, "split")?;
    let field = f.field();
    let n = f.nvars();
    let weights = weights_for(f)?;
    let w = weights.as_slice().to_vec();
    let op = |h: &Polynomial| f.op_n(h);
    let mut solver = ImageSolver::new(&op, field, weights.clone(), p - 1);
    let mut d = start_degree(&w, g, p as u64);
    for step in 0..=limits::max_degree_growth() {
        solver.grow_to(d)?;
        let (res_g, _) = solver.reduce(g);
        let space = TruncatedSpace::with_slack(weights.clone(), d, p - 1)?;
        let mut reps = Echelon::new(field, n, n);
        for m in space.basis().iter().rev().filter(|m| is_representative(m, p)) {
            let rho = Polynomial::monomial(field, n, m.clone(), field.one());
            let (res, _) = solver.reduce(&rho);
            reps.insert(res, rho);
        }
        let (left, r) = reps.reduce(&res_g);
        if left.is_zero() {
            let (rest, h) = solver.reduce(&g.sub(&r));
            debug_assert!(rest.is_zero());
            if f.op_n(&h)? != g.sub(&r) {
                return Err(Error::UnsupportedInput("internal: split does not recompose".into()));
            }
            return Ok(SplitResult { r, h, unique: reps.kernel().is_empty() });
        }
        if step < limits::max_degree_growth() {
            d = p as u64 * (d + 1) - 1;
        }
    }
    Err(Error::DegreeGrowthExceeded { degree: d as usize })
}

/// Writes `g = r + N(h)` with `r ∈ x_n^(p-1) k[x_1^p, ..., x_n^p]`.
pub fn split(f: &TriangularMap, g: &Polynomial) -> Result<SplitResult> {
    require_max_order(f)?;
    split_any(f, g)
}

/// Conjugates a maximal-order map to `(x_i + f_i', ..., x_n + f_n)` with every
/// `f_i'` in `x_n^(p-1) k[x_{i+1}^p, ..., x_n^p]`.
pub fn canonical_max_order(f: &TriangularMap) -> Result<ClassReport> {
    let p = require_max_order(f)?;
    let n = f.nvars();
    let mut t = Tracker::new(f);
    for i in (0..n.saturating_sub(1)).rev() {
        let tail = t.current.restrict_tail(i + 1)?;
        debug_assert_eq!(tail.order_charp()?, (p as u128).pow((n - 1 - i) as u32));
        let fi = t.current.tail(i).drop_leading(i + 1)?;
        let s = split_any(&tail, &fi)?;
        t.shift_row(i, s.h.embed(n, i + 1))?;
    }
    let order = t.current.order_charp()?;
    if order != (p as u128).pow(n as u32) {
        return Err(Error::UnsupportedInput("internal: canonical form lost maximal order".into()));
    }
    ClassReport::from_tracker(ClassLabel::MaxOrder, t, Order::Finite(order)).checked(f)
}

/// Conjugates a map with `F^p = I` and a translation in the last row to
/// `(x_1, ..., x_{n-1}, x_n + f_n)`.
pub fn conjugate_order_p(f: &TriangularMap) -> Result<ClassReport> {
    let p = characteristic(f, "conjugate_order_p")?;
    if !f.is_strictly_triangular() {
        return Err(Error::NotStrictlyTriangular);
    }
    let n = f.nvars();
    let field = f.field();
    let c = f.tail(n - 1).as_constant().expect("last tail is constant");
    if c.is_zero() {
        return Err(Error::LastComponentNotUnit);
    }
    let order = f.order_charp()?;
    if order != p as u128 {
        return Err(Error::OrderNotP { order: order.to_string() });
    }
    let mut t = Tracker::new(f);
    for i in (0..n - 1).rev() {
        let tail = t.current.restrict_tail(i + 1)?;
        let m = tail.nvars();
        // Σ_{j<p} (x + jc)^(p-1) = -c^(p-1).
        let xn = Polynomial::var(field, m, m - 1);
        let u = xn.pow(p as u64 - 1).scale(&c.pow_u64(p as u64 - 1).neg().inv()?);
        let fi = t.current.tail(i).drop_leading(i + 1)?;
        let h = homotopy_preimage(&tail, p as u128, &u, &fi)?;
        t.shift_row(i, h.embed(n, i + 1))?;
        debug_assert!(t.current.tail(i).is_zero());
    }
    ClassReport::from_tracker(ClassLabel::Translation, t, Order::Finite(p as u128)).checked(f)
}

/// All trackers reachable from `t` by the given conjugators.
fn orbit(t: &Tracker, steps: Vec<TriangularMap>, renormalize: impl Fn(&mut Tracker) -> Result<()>) -> Result<Vec<Tracker>> {
    let mut out = Vec::with_capacity(steps.len());
    for s in steps {
        let mut c = t.clone();
        c.conjugate_by(s)?;
        renormalize(&mut c)?;
        out.push(c);
    }
    Ok(out)
}

fn y_affine_steps(field: Field, scalings: bool) -> Result<Vec<TriangularMap>> {
    let mut out = Vec::new();
    let nus = if scalings { field.units()? } else { vec![field.one()] };
    for nu in nus {
        for lambda in field.elements()? {
            // (x, ν y + λ) as a product of (x, y + λ/ν)... built directly.
            let row2 = Polynomial::constant(field, 2, lambda);
            out.push(TriangularMap::new(field, vec![(field.one(), Polynomial::zero(field, 2)), (nu.clone(), row2)])?);
        }
    }
    Ok(out)
}

/// Re-reduces the first row of a strictly triangular plane map with second
/// row `y + 1` modulo the image of `N` of the tail.
fn recanonicalize_unipotent(t: &mut Tracker) -> Result<()> {
    let n = 2;
    let tail = t.current.restrict_tail(1)?;
    let f1 = t.current.tail(0).drop_leading(1)?;
    let s = split_any(&tail, &f1)?;
    t.shift_row(0, s.h.embed(n, 1))
}

/// Classification of plane triangular maps over `F_p` with canonical
/// representatives unique in the conjugacy class under the chosen group.
pub fn classify_dim2_charp(f: &TriangularMap, group: Group) -> Result<ClassReport> {
    let p = characteristic(f, "classify_dim2_charp")?;
    plane::require_plane(f)?;
    let field = f.field();
    if group == Group::Ba && !f.is_strictly_triangular() {
        return Err(Error::NotStrictlyTriangular);
    }
    let mut t = Tracker::new(f);
    if f.is_identity() {
        return ClassReport::from_tracker(ClassLabel::Identity, t, Order::Finite(1)).checked(f);
    }
    let order = f.order()?;
    if group == Group::Ba {
        let c = f.tail(1).as_constant().expect("constant");
        if !c.is_zero() {
            if order == Order::Finite(p as u128) {
                return conjugate_order_p(f);
            }
            let mut r = canonical_max_order(f)?;
            r.label = ClassLabel::MaxOrder;
            return Ok(r);
        }
        // (x + f(y), y): the group acts by y ↦ y + λ only.
        let cands = orbit(&t, y_affine_steps(field, false)?, |_| Ok(()))?;
        return ClassReport::from_tracker(ClassLabel::OrderP, least(cands), order).checked(f);
    }

    let row = normalize_second_row(&mut t)?;
    strip_first_row(&mut t, &row)?;
    let a_is_one = t.current.unit(0).is_one();
    let label;
    match row {
        SecondRow::Scaling(_) => {
            if t.current.tail(0).is_zero() {
                label = ClassLabel::Affine;
            } else {
                label = if a_is_one { ClassLabel::Mixed } else { ClassLabel::Sequential };
                make_monic(&mut t)?;
                let cands = orbit(&t, y_affine_steps(field, true)?.into_iter().filter(|s| s.tail(1).is_zero()).collect(), make_monic)?;
                t = least(cands);
            }
        }
        SecondRow::Translation => {
            if !a_is_one || t.current.order_charp()? == p as u128 {
                if a_is_one {
                    let r = conjugate_order_p(&t.current)?;
                    t.witness.extend(&r.witness)?;
                    t.current = r.canonical;
                }
                label = ClassLabel::Affine;
            } else {
                let r = canonical_max_order(&t.current)?;
                t.witness.extend(&r.witness)?;
                t.current = r.canonical;
                make_monic(&mut t)?;
                let shifts = y_affine_steps(field, false)?;
                let cands = orbit(&t, shifts, |c| {
                    recanonicalize_unipotent(c)?;
                    make_monic(c)
                })?;
                t = least(cands);
                label = ClassLabel::Unipotent;
            }
        }
        SecondRow::Fixed => {
            if t.current.tail(0).is_zero() {
                label = if t.current.is_identity() { ClassLabel::Identity } else { ClassLabel::Affine };
            } else if !a_is_one {
                label = ClassLabel::Affine;
            } else {
                make_monic(&mut t)?;
                let cands = orbit(&t, y_affine_steps(field, true)?, make_monic)?;
                t = least(cands);
                label = ClassLabel::OrderP;
            }
        }
    }
    let order = t.current.order()?;
    ClassReport::from_tracker(label, t, order).checked(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trimap::parse_map;

    #[test]
    fn homotopy_solves_one_variable() {
        let f = parse_map("F3 [x1 -> x1 + 1]").unwrap();
        let g = crate::poly::parse_polynomial("x1 + 2", f.field(), 1).unwrap();
        // Σ_{j<3} (x+j)^2 = 2, so u = x^2 / 2.
        let u = crate::poly::parse_polynomial("2*x1^2", f.field(), 1).unwrap();
        let h = homotopy_preimage(&f, 3, &u, &g).unwrap();
        assert_eq!(f.op_n(&h).unwrap(), g);
    }
}
