//! Coefficient fields and their scalars.
//!
//! Two kinds of field are supported: the rationals, with unbounded
//! lowest-terms fractions, and prime fields `F_p` with `p < 2^31`, whose
//! elements are kept as canonical residues in `[0, p)`. Because both
//! representations are canonical, structural equality is mathematical
//! equality.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u32),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// The prime field `F_p`; fails unless `p` is a prime below `2^31`.
    pub fn prime(p: u64) -> Result<Field> {
        if p >= (1u64 << 31) || !is_prime(p) {
            return Err(Error::InvalidPrime { modulus: p });
        }
        Ok(Field::Prime(p as u32))
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            Field::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::P {
                value: v.rem_euclid(p as i64) as u32,
                modulus: p,
            },
        }
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match *self {
            Field::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::P {
                value: (v % p as u64) as u32,
                modulus: p,
            },
        }
    }

    /// Maps a rational number into the field. Over `F_p` the denominator must
    /// be invertible.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        match *self {
            Field::Rationals => Ok(Scalar::Q(q.clone())),
            Field::Prime(p) => {
                let reduce = |b: &BigInt| -> u32 {
                    b.mod_floor(&BigInt::from(p)).to_u32().expect("residue fits in u32")
                };
                let num = self.from_u64(reduce(q.numer()) as u64);
                let den = self.from_u64(reduce(q.denom()) as u64);
                Ok(num.mul(&den.inv()?))
            }
        }
    }

    /// Number of elements, or `None` for an infinite field.
    pub fn size(&self) -> Option<u64> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some(*p as u64),
        }
    }

    /// All elements of a finite field, in residue order.
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        match *self {
            Field::Rationals => Err(Error::UnsupportedField),
            Field::Prime(p) => Ok((0..p as u64).map(|v| self.from_u64(v)).collect()),
        }
    }

    /// The nonzero elements of a finite field.
    pub fn units(&self) -> Result<Vec<Scalar>> {
        Ok(self.elements()?.into_iter().filter(|s| !s.is_zero()).collect())
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    /// `Q` or `F<p>` (also `QQ`, `GF(p)`).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "Q" || t == "QQ" {
            return Ok(Field::Rationals);
        }
        let digits = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix('F'))
            .ok_or_else(|| Error::Parse { line: 1, column: 1, message: format!("unknown field '{t}'") })?;
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::Parse { line: 1, column: 2, message: format!("'{digits}' is not a prime") })?;
        Field::prime(p)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// An element of a [`Field`].
///
/// Arithmetic between scalars of different fields is a programming error and
/// panics; public entry points check field agreement before computing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    P { value: u32, modulus: u32 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rationals,
            Scalar::P { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::P { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::P { value, .. } => *value == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::P { value: a, modulus: p }, Scalar::P { value: b, modulus: q }) if p == q => {
                Scalar::P {
                    value: ((*a as u64 + *b as u64) % *p as u64) as u32,
                    modulus: *p,
                }
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::P { value, modulus } => Scalar::P {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::P { value: a, modulus: p }, Scalar::P { value: b, modulus: q }) if p == q => {
                Scalar::P {
                    value: ((*a as u64 * *b as u64) % *p as u64) as u32,
                    modulus: *p,
                }
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            // Fermat: a^(p-2) = a^-1.
            Scalar::P { modulus, .. } => self.pow_u64(*modulus as u64 - 2),
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow_u64(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents invert first.
    pub fn pow_i64(&self, e: i64) -> Result<Scalar> {
        if e >= 0 {
            Ok(self.pow_u64(e as u64))
        } else {
            Ok(self.inv()?.pow_u64(e.unsigned_abs()))
        }
    }

    /// Multiplicative order, if finite: residues always have one; over the
    /// rationals only `1` and `-1` do.
    pub fn multiplicative_order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Q(q) => {
                if q.is_one() {
                    Some(1)
                } else if (-q).is_one() {
                    Some(2)
                } else {
                    None
                }
            }
            Scalar::P { modulus, .. } => {
                let group = *modulus as u64 - 1;
                let mut best = group;
                for d in divisors(group) {
                    if self.pow_u64(d).is_one() {
                        best = best.min(d);
                    }
                }
                Some(best)
            }
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(q) => Some(q),
            Scalar::P { .. } => None,
        }
    }

    pub fn as_residue(&self) -> Option<u32> {
        match self {
            Scalar::P { value, .. } => Some(*value),
            Scalar::Q(_) => None,
        }
    }

    /// A total order used to pick deterministic orbit representatives:
    /// residues by value; rationals by sign (zero, positive, negative), then
    /// numerator magnitude, then denominator.
    pub fn canonical_cmp(&self, other: &Scalar) -> std::cmp::Ordering {
        match (self, other) {
            (Scalar::P { value: a, .. }, Scalar::P { value: b, .. }) => a.cmp(b),
            (Scalar::Q(a), Scalar::Q(b)) => {
                let sign = |q: &BigRational| -> u8 {
                    if q.is_zero() {
                        0
                    } else if q.is_positive() {
                        1
                    } else {
                        2
                    }
                };
                sign(a)
                    .cmp(&sign(b))
                    .then_with(|| a.numer().abs().cmp(&b.numer().abs()))
                    .then_with(|| a.denom().cmp(b.denom()))
            }
            _ => panic!("scalar field mismatch"),
        }
    }
}

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::P { value, .. } => write!(f, "{value}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(Field::prime(4).is_err());
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(2_147_483_659).is_err());
        assert_eq!(Field::prime(2_147_483_647).unwrap(), Field::Prime(2_147_483_647));
    }

    #[test]
    fn residue_inverse() {
        let f = Field::Prime(7);
        for v in 1..7 {
            let a = f.from_i64(v);
            assert!(a.mul(&a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn large_prime_products_do_not_overflow() {
        let f = Field::Prime(2_147_483_647);
        let a = f.from_i64(2_147_483_646);
        assert!(a.mul(&a).is_one());
    }

    #[test]
    fn orders() {
        assert_eq!(Field::Prime(5).from_i64(2).multiplicative_order(), Some(4));
        assert_eq!(Field::Rationals.from_i64(-1).multiplicative_order(), Some(2));
        assert_eq!(Field::Rationals.from_i64(3).multiplicative_order(), None);
    }
}
