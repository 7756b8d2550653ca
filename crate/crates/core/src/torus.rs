//! Normal form for conjugation by diagonal maps over the rationals.
//!
//! Conjugating by `diag(t_1, ..., t_n)` multiplies the coefficient of the
//! monomial `x^m` in row `i` by `t^(m - e_i)`. For each prime `q` the
//! valuations of the coefficients therefore move by the lattice spanned by
//! these characters, and the signs move by the same lattice mod 2. Reducing
//! both against echelon bases with pivots ordered like the coefficients
//! (first row, largest monomial first) picks one point per orbit.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::trimap::TriangularMap;

/// Diagonal scalars `t` such that conjugating `f` by `diag(t)` gives the torus
/// normal form of `f`.
pub(crate) fn normalizing_scalars(f: &TriangularMap) -> Result<Vec<Scalar>> {
    if f.field() != Field::Rationals {
        return Err(Error::UnsupportedField);
    }
    let n = f.nvars();
    let mut chars: Vec<Vec<i64>> = Vec::new();
    let mut coeffs = Vec::new();
    for i in 0..n {
        for (m, c) in f.tail(i).terms() {
            let mut chi: Vec<i64> = m.exponents().iter().map(|&e| e as i64).collect();
            chi[i] -= 1;
            chars.push(chi);
            coeffs.push(c.as_rational().expect("rational coefficient").clone());
        }
    }
    let k = chars.len();
    let gens: Vec<Vec<i64>> = (0..n).map(|j| chars.iter().map(|chi| chi[j]).collect()).collect();

    let mut primes: Vec<u64> = Vec::new();
    for c in &coeffs {
        for part in [c.numer(), c.denom()] {
            for q in factor(part)? {
                if !primes.contains(&q) {
                    primes.push(q);
                }
            }
        }
    }
    primes.sort_unstable();

    let mut t: Vec<Scalar> = vec![Field::Rationals.one(); n];
    let basis = hermite(&gens);
    for &q in &primes {
        let mut v: Vec<i64> = coeffs.iter().map(|c| valuation(c.numer(), q) - valuation(c.denom(), q)).collect();
        let mut e = vec![0i64; n];
        for (row, tr, col) in &basis {
            let piv = row[*col];
            let s = Integer::div_floor(&v[*col], &piv);
            if s != 0 {
                for x in 0..k {
                    v[x] -= s * row[x];
                }
                for j in 0..n {
                    e[j] -= s * tr[j];
                }
            }
        }
        let qs = Field::Rationals.from_u64(q);
        for j in 0..n {
            t[j] = t[j].mul(&qs.pow_i64(e[j])?);
        }
    }

    let mut s: Vec<u8> = coeffs.iter().map(|c| u8::from(c.is_negative())).collect();
    let mut eps = vec![0u8; n];
    for (row, tr, col) in rref_mod2(&gens) {
        if s[col] == 1 {
            for x in 0..k {
                s[x] ^= row[x];
            }
            for j in 0..n {
                eps[j] ^= tr[j];
            }
        }
    }
    for j in 0..n {
        if eps[j] == 1 {
            t[j] = t[j].neg();
        }
    }
    Ok(t)
}

type Row = (Vec<i64>, Vec<i64>, usize);

/// Reduced row echelon basis over the integers of the span of `gens`, each
/// row with its expression in the generators and its pivot column. Pivots are
/// positive and entries above a pivot lie in `[0, pivot)`.
fn hermite(gens: &[Vec<i64>]) -> Vec<Row> {
    let n = gens.len();
    let k = gens.first().map_or(0, Vec::len);
    let mut rest: Vec<(Vec<i64>, Vec<i64>)> = gens
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let mut tr = vec![0; n];
            tr[j] = 1;
            (g.clone(), tr)
        })
        .collect();
    let mut basis: Vec<Row> = Vec::new();
    for col in 0..k {
        loop {
            let nz: Vec<usize> = (0..rest.len()).filter(|&r| rest[r].0[col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&r) = nz.first() {
                    let (mut row, mut tr) = rest.swap_remove(r);
                    if row[col] < 0 {
                        row.iter_mut().for_each(|x| *x = -*x);
                        tr.iter_mut().for_each(|x| *x = -*x);
                    }
                    basis.push((row, tr, col));
                }
                break;
            }
            let p = *nz.iter().min_by_key(|&&r| rest[r].0[col].abs()).unwrap();
            let (prow, ptr) = rest[p].clone();
            for &r in &nz {
                if r == p {
                    continue;
                }
                let s = Integer::div_floor(&rest[r].0[col], &prow[col]);
                for x in 0..k {
                    rest[r].0[x] -= s * prow[x];
                }
                for j in 0..n {
                    rest[r].1[j] -= s * ptr[j];
                }
            }
        }
    }
    for a in 0..basis.len() {
        for b in a + 1..basis.len() {
            let (brow, btr, bcol) = basis[b].clone();
            let s = Integer::div_floor(&basis[a].0[bcol], &brow[bcol]);
            if s != 0 {
                for x in 0..k {
                    basis[a].0[x] -= s * brow[x];
                }
                for j in 0..n {
                    basis[a].1[j] -= s * btr[j];
                }
            }
        }
    }
    basis
}

fn rref_mod2(gens: &[Vec<i64>]) -> Vec<(Vec<u8>, Vec<u8>, usize)> {
    let n = gens.len();
    let k = gens.first().map_or(0, Vec::len);
    let mut rest: Vec<(Vec<u8>, Vec<u8>)> = gens
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let mut tr = vec![0u8; n];
            tr[j] = 1;
            (g.iter().map(|&x| (x.rem_euclid(2)) as u8).collect(), tr)
        })
        .collect();
    let mut basis: Vec<(Vec<u8>, Vec<u8>, usize)> = Vec::new();
    for col in 0..k {
        let Some(r) = rest.iter().position(|(row, _)| row[col] == 1) else { continue };
        let (row, tr) = rest.swap_remove(r);
        for other in rest.iter_mut() {
            if other.0[col] == 1 {
                xor(&mut other.0, &row);
                xor(&mut other.1, &tr);
            }
        }
        for b in basis.iter_mut() {
            if b.0[col] == 1 {
                xor(&mut b.0, &row);
                xor(&mut b.1, &tr);
            }
        }
        basis.push((row, tr, col));
    }
    basis
}

fn xor(a: &mut [u8], b: &[u8]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

fn valuation(x: &BigInt, q: u64) -> i64 {
    let q = BigInt::from(q);
    let mut x = x.abs();
    let mut v = 0;
    while !x.is_zero() && (&x % &q).is_zero() {
        x /= &q;
        v += 1;
    }
    v
}

/// Prime factors of `|x|`; limited to values that fit in 64 bits.
fn factor(x: &BigInt) -> Result<Vec<u64>> {
    let Some(v) = x.abs().to_u64() else {
        return Err(Error::UnsupportedInput(format!("coefficient {x} is too large to factor")));
    };
    let mut out = Vec::new();
    if v > 1 {
        factor_into(v, &mut out);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn factor_into(mut v: u64, out: &mut Vec<u64>) {
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while v.is_multiple_of(p) {
            out.push(p);
            v /= p;
        }
    }
    if v == 1 {
        return;
    }
    if is_prime(v) {
        out.push(v);
        return;
    }
    let d = (1..).map(|c| pollard_rho(v, c)).find(|&d| d != v).unwrap();
    factor_into(d, out);
    factor_into(v / d, out);
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let small = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if small.contains(&n) {
        return true;
    }
    if small.iter().any(|p| n.is_multiple_of(*p)) {
        return false;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in small {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64, c: u64) -> u64 {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
    while d == 1 {
        x = f(x);
        y = f(f(y));
        d = x.abs_diff(y).gcd(&n);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trimap::parse_map;

    #[test]
    fn factors_composites() {
        assert_eq!(factor(&BigInt::from(360)).unwrap(), vec![2, 3, 5]);
        assert_eq!(factor(&BigInt::from(1_000_000_007u64 * 998_244_353)).unwrap(), vec![998_244_353, 1_000_000_007]);
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn reduces_primes_and_signs() {
        let f = parse_map("Q [x1 -> x1 + 3*x2^2 - 1, x2 -> x2]").unwrap();
        let t = normalizing_scalars(&f).unwrap();
        let g = f.conjugate(&TriangularMap::diagonal(Field::Rationals, t).unwrap()).unwrap();
        assert_eq!(g, parse_map("Q [x1 -> x1 + x2^2 - 3, x2 -> x2]").unwrap());
    }
}
