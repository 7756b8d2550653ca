//! Seeded random generation of polynomials, maps and conjugators, used by
//! property tests, the acceptance suite and the CLI's self-checks.

use rand::Rng;

use crate::error::Result;
use crate::field::{Field, Scalar};
use crate::poly::{Monomial, Polynomial};
use crate::trimap::TriangularMap;

/// A uniformly random scalar; over the rationals, a small integer or a
/// fraction with small denominator.
pub fn random_scalar<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    match field {
        Field::Prime(p) => field.from_u64(rng.gen_range(0..p as u64)),
        Field::Rationals => {
            let num = rng.gen_range(-5i64..=5);
            let den = if rng.gen_bool(0.2) { rng.gen_range(1i64..=3) } else { 1 };
            let q = num_rational::BigRational::new(num.into(), den.into());
            Scalar::Q(q)
        }
    }
}

pub fn random_unit<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    loop {
        let s = random_scalar(rng, field);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A random polynomial in the variables `first..n` with total degree at most
/// `max_deg` and at most `max_terms` terms.
pub fn random_poly<R: Rng>(rng: &mut R, field: Field, n: usize, first: usize, max_deg: u32, max_terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(field, n);
    if first >= n {
        return p;
    }
    let count = rng.gen_range(0..=max_terms);
    for _ in 0..count {
        let mut exps = vec![0u32; n];
        let mut budget = rng.gen_range(0..=max_deg);
        while budget > 0 {
            let v = rng.gen_range(first..n);
            exps[v] += 1;
            budget -= 1;
        }
        p = p.add(&Polynomial::monomial(field, n, Monomial::from_exponents(&exps), random_scalar(rng, field)));
    }
    p
}

/// A random strictly triangular map with tails of degree at most `max_deg`.
pub fn random_strict_map<R: Rng>(rng: &mut R, field: Field, n: usize, max_deg: u32, max_terms: usize) -> TriangularMap {
    let rows = (0..n)
        .map(|i| (field.one(), random_poly(rng, field, n, i + 1, max_deg, max_terms)))
        .collect();
    TriangularMap::new(field, rows).expect("random rows are triangular")
}

/// A random triangular map with random nonzero diagonal.
pub fn random_map<R: Rng>(rng: &mut R, field: Field, n: usize, max_deg: u32, max_terms: usize) -> TriangularMap {
    let rows = (0..n)
        .map(|i| (random_unit(rng, field), random_poly(rng, field, n, i + 1, max_deg, max_terms)))
        .collect();
    TriangularMap::new(field, rows).expect("random rows are triangular")
}

/// Attempts made by [`random_max_order_map`] before giving up.
pub const MAX_ORDER_ATTEMPTS: usize = 10_000;

/// Rejection-samples a strictly triangular map of order `p^n`: the last row is
/// a nonzero translation, the other tails are random. Low degree bounds can
/// make maximal order unreachable (for `n = 3` the first row needs degree
/// about `2(p-1)`), in which case this fails with `ResourceCap`.
pub fn random_max_order_map<R: Rng>(rng: &mut R, field: Field, n: usize, max_deg: u32, max_terms: usize) -> Result<TriangularMap> {
    for _ in 0..MAX_ORDER_ATTEMPTS {
        let mut rows: Vec<(Scalar, Polynomial)> = (0..n)
            .map(|i| (field.one(), random_poly(rng, field, n, i + 1, max_deg, max_terms)))
            .collect();
        rows[n - 1].1 = Polynomial::constant(field, n, random_unit(rng, field));
        let f = TriangularMap::new(field, rows)?;
        if crate::charp::is_max_order(&f)? {
            return Ok(f);
        }
    }
    Err(crate::Error::ResourceCap(format!("no map of maximal order found in {MAX_ORDER_ATTEMPTS} samples")))
}

/// A random conjugator in the strictly triangular group.
pub fn random_conjugator<R: Rng>(rng: &mut R, field: Field, n: usize, max_deg: u32) -> TriangularMap {
    random_strict_map(rng, field, n, max_deg, 3)
}
