//! Triangular automorphisms `F = (a_1 x_1 + f_1, ..., a_n x_n + f_n)` with
//! `f_i` in the variables after `x_i`, and the operators `N = F - I` and
//! `M_i = sum_{j < p^(n+1-i)} F^j`.
//!
//! Conventions:
//! * `compose(F, G)` has components `F_i(G_1, ..., G_n)`, i.e. the point map
//!   `F ∘ G`.
//! * `apply(F, g) = g(F_1, ..., F_n)`. Consequently
//!   `apply(compose(F, G), g) = apply(G, apply(F, g))`: substitution is a
//!   right action.
//! * `conjugate(F, τ) = τ⁻¹ ∘ F ∘ τ`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::poly::parse::{polynomial_at, Cursor};
use crate::poly::{Monomial, Polynomial};

/// The order of a group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(u128),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u128> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangularMap {
    field: Field,
    n: usize,
    rows: Vec<(Scalar, Polynomial)>,
}

impl TriangularMap {
    /// Builds a map from rows `(a_i, f_i)`, checking triangularity.
    pub fn new(field: Field, rows: Vec<(Scalar, Polynomial)>) -> Result<Self> {
        let n = rows.len();
        for (i, (a, f)) in rows.iter().enumerate() {
            if a.field() != field || f.field() != field {
                return Err(Error::FieldMismatch);
            }
            if f.nvars() != n {
                return Err(Error::ArityMismatch { expected: n, found: f.nvars() });
            }
            if a.is_zero() {
                return Err(Error::NotTriangular { row: i + 1, reason: format!("coefficient of x{} is zero", i + 1) });
            }
            if !f.involves_only_from(i + 1) {
                return Err(Error::NotTriangular {
                    row: i + 1,
                    reason: format!("tail {f} involves x1..x{}", i + 1),
                });
            }
        }
        Ok(TriangularMap { field, n, rows })
    }

    /// Splits each component `a_i x_i + f_i` into its row.
    pub fn from_components(field: Field, comps: Vec<Polynomial>) -> Result<Self> {
        let n = comps.len();
        let mut rows = Vec::with_capacity(n);
        for (i, c) in comps.into_iter().enumerate() {
            if c.nvars() != n {
                return Err(Error::ArityMismatch { expected: n, found: c.nvars() });
            }
            let xi = Monomial::var(n, i);
            let a = c.coefficient(&xi);
            let f = c.sub(&Polynomial::monomial(field, n, xi, a.clone()));
            if !f.involves_only_from(i + 1) {
                return Err(Error::NotTriangular {
                    row: i + 1,
                    reason: format!("component {c} is not of the form a*x{} + f(x{}..x{n})", i + 1, i + 2),
                });
            }
            rows.push((a, f));
        }
        Self::new(field, rows)
    }

    pub fn identity(field: Field, n: usize) -> Self {
        TriangularMap { field, n, rows: vec![(field.one(), Polynomial::zero(field, n)); n] }
    }

    /// `(x_1, ..., x_i + g, ..., x_n)` with `g` free of `x_1..x_i`.
    pub fn elementary(field: Field, n: usize, i: usize, g: Polynomial) -> Result<Self> {
        let mut rows = vec![(field.one(), Polynomial::zero(field, n)); n];
        rows[i].1 = g;
        Self::new(field, rows)
    }

    /// The diagonal map `(λ_1 x_1, ..., λ_n x_n)`.
    pub fn diagonal(field: Field, scalars: Vec<Scalar>) -> Result<Self> {
        let n = scalars.len();
        Self::new(field, scalars.into_iter().map(|s| (s, Polynomial::zero(field, n))).collect())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[(Scalar, Polynomial)] {
        &self.rows
    }

    pub fn unit(&self, i: usize) -> &Scalar {
        &self.rows[i].0
    }

    pub fn tail(&self, i: usize) -> &Polynomial {
        &self.rows[i].1
    }

    pub fn component(&self, i: usize) -> Polynomial {
        let (a, f) = &self.rows[i];
        f.add(&Polynomial::monomial(self.field, self.n, Monomial::var(self.n, i), a.clone()))
    }

    pub fn components(&self) -> Vec<Polynomial> {
        (0..self.n).map(|i| self.component(i)).collect()
    }

    pub fn is_strictly_triangular(&self) -> bool {
        self.rows.iter().all(|(a, _)| a.is_one())
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().all(|(a, f)| a.is_one() && f.is_zero())
    }

    pub fn is_affine(&self) -> bool {
        self.rows.iter().all(|(_, f)| f.total_degree().unwrap_or(0) <= 1)
    }

    fn check_compatible(&self, other: &TriangularMap) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::ArityMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// The map whose components are `F_i(G)`.
    pub fn compose(&self, other: &TriangularMap) -> Result<TriangularMap> {
        self.check_compatible(other)?;
        let images = other.components();
        let comps = (0..self.n)
            .map(|i| self.component(i).substitute(&images))
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(self.field, comps)
    }

    /// Inverse by back-substitution from the last row upward.
    pub fn inverse(&self) -> Result<TriangularMap> {
        let n = self.n;
        let mut images: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(self.field, n, i)).collect();
        for i in (0..n).rev() {
            let (a, f) = &self.rows[i];
            let fi = f.substitute(&images)?;
            let xi = Polynomial::var(self.field, n, i);
            images[i] = xi.sub(&fi).scale(&a.inv()?);
        }
        Self::from_components(self.field, images)
    }

    /// `F^m`; negative exponents go through the inverse.
    pub fn power(&self, m: i64) -> Result<TriangularMap> {
        let base = if m < 0 { self.inverse()? } else { self.clone() };
        base.power_u(m.unsigned_abs() as u128)
    }

    pub fn power_u(&self, mut e: u128) -> Result<TriangularMap> {
        let mut acc = Self::identity(self.field, self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// `τ⁻¹ ∘ F ∘ τ`.
    pub fn conjugate(&self, tau: &TriangularMap) -> Result<TriangularMap> {
        tau.inverse()?.compose(self)?.compose(tau)
    }

    /// `g(F_1, ..., F_n)`.
    pub fn apply(&self, g: &Polynomial) -> Result<Polynomial> {
        if g.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        g.substitute(&self.components())
    }

    /// `N(g) = F(g) - g`.
    pub fn op_n(&self, g: &Polynomial) -> Result<Polynomial> {
        Ok(self.apply(g)?.sub(g))
    }

    /// `M_i(g) = sum_{j < p^(n+1-i)} F^j(g)` for the one-based index `i`.
    ///
    /// Evaluated as the product `prod_k (sum_{j<p} F^(j p^k))`, which only needs
    /// the cached powers `F^(p^k)`.
    pub fn op_m(&self, i: usize, g: &Polynomial) -> Result<Polynomial> {
        let p = self.field.characteristic();
        if p == 0 {
            return Err(Error::CharZeroM);
        }
        if i == 0 || i > self.n {
            return Err(Error::UnsupportedInput(format!("M index {i} outside 1..{}", self.n)));
        }
        self.orbit_sum(p as u128, (self.n + 1 - i) as u32, g)
    }

    /// `sum_{j < p^m} F^j(g)`.
    pub fn orbit_sum(&self, p: u128, m: u32, g: &Polynomial) -> Result<Polynomial> {
        let mut step = self.clone();
        let mut t = g.clone();
        for k in 0..m {
            let comps = step.components();
            let mut acc = t.clone();
            let mut cur = t;
            for _ in 1..p {
                cur = cur.substitute(&comps)?;
                acc = acc.add(&cur);
            }
            t = acc;
            if k + 1 < m {
                step = step.power_u(p)?;
            }
        }
        Ok(t)
    }

    /// Least `p^m` with `F^(p^m) = I`, for strictly triangular maps in
    /// characteristic `p`.
    pub fn order_charp(&self) -> Result<u128> {
        let p = self.field.characteristic();
        if p == 0 {
            return Err(Error::CharZero { op: "order_charp" });
        }
        if !self.is_strictly_triangular() {
            return Err(Error::NotStrictlyTriangular);
        }
        let mut g = self.clone();
        let mut order: u128 = 1;
        let mut steps = 0;
        while !g.is_identity() {
            g = g.power_u(p as u128)?;
            if steps == 0 {
                debug_assert!(g.tail(self.n - 1).is_zero(), "F^p must fix the last variable");
            }
            order *= p as u128;
            steps += 1;
            assert!(steps <= self.n, "a strictly triangular map has order dividing p^n");
        }
        Ok(order)
    }

    /// The order in the group of triangular automorphisms.
    ///
    /// With `L` the lcm of the diagonal orders, `ord(F) = L * ord(F^L)` and
    /// `F^L` is strictly triangular.
    pub fn order(&self) -> Result<Order> {
        let mut l: u128 = 1;
        for (a, _) in &self.rows {
            match a.multiplicative_order() {
                Some(k) => l = lcm(l, k as u128),
                None => return Ok(Order::Infinite),
            }
        }
        let g = self.power_u(l)?;
        if self.field.characteristic() == 0 {
            Ok(if g.is_identity() { Order::Finite(l) } else { Order::Infinite })
        } else {
            Ok(Order::Finite(l * g.order_charp()?))
        }
    }

    /// The map on coordinates `k..n` as a map in `n - k` variables.
    pub fn restrict_tail(&self, k: usize) -> Result<TriangularMap> {
        let rows = self.rows[k..]
            .iter()
            .map(|(a, f)| Ok((a.clone(), f.drop_leading(k)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.field, rows)
    }

    /// Extends a map on the last `m` coordinates by the identity on the first
    /// `total - m` ones.
    pub fn extend_front(&self, total: usize) -> Result<TriangularMap> {
        let k = total - self.n;
        let mut rows = vec![(self.field.one(), Polynomial::zero(self.field, total)); k];
        rows.extend(self.rows.iter().map(|(a, f)| (a.clone(), f.embed(total, k))));
        Self::new(self.field, rows)
    }

    /// Evaluates at a point of `F_p^n`.
    pub fn eval_point(&self, point: &Point) -> Result<Point> {
        let xs: Vec<Scalar> = point.coords.iter().map(|&v| self.field.from_u64(v as u64)).collect();
        let coords = self
            .components()
            .iter()
            .map(|c| Ok(c.evaluate(&xs)?.as_residue().expect("prime field")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Point { coords })
    }

    /// Order of the permutation of `F_p^n` induced by `F`.
    pub fn perm_order(&self) -> Result<u128> {
        let p = match self.field {
            Field::Rationals => return Err(Error::CharZero { op: "perm_order" }),
            Field::Prime(p) => p as u64,
        };
        let total = (p as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX);
        if total > PERM_LIMIT {
            return Err(Error::TooManyPoints { points: total, limit: PERM_LIMIT });
        }
        let compiled = CompiledMap::new(self, p);
        let total = total as usize;
        let mut seen = vec![false; total];
        let mut coords = vec![0u64; self.n];
        let mut order: u128 = 1;
        for start in 0..total {
            if seen[start] {
                continue;
            }
            let mut len: u128 = 0;
            let mut idx = start;
            loop {
                seen[idx] = true;
                len += 1;
                decode(idx, p, &mut coords);
                idx = compiled.step(&coords);
                if idx == start {
                    break;
                }
            }
            order = lcm(order, len);
        }
        Ok(order)
    }
}

/// Enumeration guard for `perm_order`.
pub const PERM_LIMIT: u128 = 10_000_000;

/// A point of `F_p^n`, stored as canonical residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub coords: Vec<u32>,
}

fn decode(mut idx: usize, p: u64, out: &mut [u64]) {
    for c in out.iter_mut().rev() {
        *c = idx as u64 % p;
        idx /= p as usize;
    }
}

/// Components flattened to `(exponents, coefficient)` lists for fast point
/// evaluation mod `p`.
struct CompiledMap {
    p: u64,
    comps: Vec<Vec<(Vec<u32>, u64)>>,
}

impl CompiledMap {
    fn new(f: &TriangularMap, p: u64) -> Self {
        let comps = f
            .components()
            .iter()
            .map(|c| {
                c.terms()
                    .map(|(m, s)| (m.exponents().to_vec(), s.as_residue().expect("prime field") as u64))
                    .collect()
            })
            .collect();
        CompiledMap { p, comps }
    }

    fn step(&self, coords: &[u64]) -> usize {
        let p = self.p;
        let mut idx = 0usize;
        for terms in &self.comps {
            let mut v = 0u64;
            for (exps, c) in terms {
                let mut t = *c;
                for (&x, &e) in coords.iter().zip(exps) {
                    if e > 0 {
                        t = t * pow_mod(x, e as u64, p) % p;
                    }
                }
                v = (v + t) % p;
            }
            idx = idx * p as usize + v as usize;
        }
        idx
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub(crate) fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

/// Parses `Q [x1 -> p1, ..., xn -> pn]` or `F<p> [...]` into the field and the
/// list of right-hand sides, ordered by variable.
pub fn parse_components(text: &str) -> Result<(Field, Vec<Polynomial>)> {
    let mut cur = Cursor::new(text);
    let field = if cur.eat('Q') {
        Field::Rationals
    } else if cur.eat('F') {
        let d = cur.digits().ok_or_else(|| cur.error("expected a prime after 'F'"))?;
        let p: u64 = d.parse().map_err(|_| cur.error("prime too large"))?;
        Field::prime(p).map_err(|_| cur.error(format!("{p} is not a prime below 2^31")))?
    } else {
        return Err(cur.error("expected a field prefix 'Q' or 'F<p>'"));
    };
    cur.expect('[')?;
    let n = text.matches("->").count();
    if n == 0 {
        return Err(cur.error("a map needs at least one component"));
    }
    let mut comps: Vec<Option<Polynomial>> = vec![None; n];
    loop {
        let v = cur.variable(n)?;
        if !cur.eat_str("->") {
            return Err(cur.error("expected '->'"));
        }
        let poly = polynomial_at(&mut cur, field, n)?;
        if comps[v].is_some() {
            return Err(cur.error(format!("x{} assigned twice", v + 1)));
        }
        comps[v] = Some(poly);
        if !cur.eat(',') {
            break;
        }
    }
    cur.expect(']')?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    let comps = comps.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| cur.error("a component is missing"))?;
    Ok((field, comps))
}

/// Parses the map grammar, e.g. `F2 [x1 -> x1 + x2, x2 -> x2 + 1]`.
pub fn parse_map(text: &str) -> Result<TriangularMap> {
    let (field, comps) = parse_components(text)?;
    TriangularMap::from_components(field, comps)
}

pub(crate) fn format_components(field: Field, comps: &[Polynomial]) -> String {
    let body: Vec<String> = comps.iter().enumerate().map(|(i, c)| format!("x{} -> {c}", i + 1)).collect();
    format!("{field} [{}]", body.join(", "))
}

impl fmt::Display for TriangularMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_components(self.field, &self.components()))
    }
}

impl std::str::FromStr for TriangularMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_map(s)
    }
}
