use proptest::prelude::*;
use triaut::poly::ArithOp;
use triaut::{parse_polynomial, Field, Monomial, Polynomial};

fn q(s: &str, n: usize) -> Polynomial {
    parse_polynomial(s, Field::Rationals, n).unwrap()
}

fn f2(s: &str, n: usize) -> Polynomial {
    parse_polynomial(s, Field::Prime(2), n).unwrap()
}

#[test]
fn difference_of_squares() {
    assert_eq!(&q("x2 + 1", 2) * &q("x2 - 1", 2), q("x2^2 - 1", 2));
}

#[test]
fn frobenius_in_char_two() {
    let y1 = f2("x1 + 1", 1);
    assert_eq!(&y1 * &y1, f2("x1^2 + 1", 1));
}

#[test]
fn mismatched_operands_are_rejected() {
    let a = q("x1", 2);
    assert!(a.arith(&q("x1", 3), ArithOp::Add).is_err());
    assert!(a.arith(&f2("x1", 2), ArithOp::Mul).is_err());
}

#[test]
fn substitution_examples() {
    let g = q("x1", 2);
    assert_eq!(g.substitute(&[q("x1 + x2^2", 2), q("x2 + 1", 2)]).unwrap(), q("x1 + x2^2", 2));

    let g = f2("x2^2", 2);
    assert_eq!(g.substitute(&[f2("x1", 2), f2("x2 + 1", 2)]).unwrap(), f2("x2^2 + 1", 2));

    // Hand expansion: (x1 + x2)(x2 + 1) = x1x2 + x1 + x2^2 + x2.
    let g = q("x1*x2", 2);
    assert_eq!(
        g.substitute(&[q("x1 + x2", 2), q("x2 + 1", 2)]).unwrap(),
        q("x1*x2 + x1 + x2^2 + x2", 2)
    );
}

#[test]
fn leading_terms() {
    let (m, c) = q("x1 + x2^5", 2).leading_term().unwrap();
    assert_eq!((m, c), (Monomial::from_exponents(&[1, 0]), Field::Rationals.one()));

    let (m, c) = q("x2^3 + x2", 2).leading_term().unwrap();
    assert_eq!((m, c), (Monomial::from_exponents(&[0, 3]), Field::Rationals.one()));

    // (2,1) > (2,0) lexicographically.
    let (m, c) = q("3*x1^2*x2 + 5*x1^2", 2).leading_term().unwrap();
    assert_eq!((m, c), (Monomial::from_exponents(&[2, 1]), Field::Rationals.from_i64(3)));

    assert!(Polynomial::zero(Field::Rationals, 2).leading_term().is_err());
}

fn arb_poly(field: Field, n: usize) -> impl Strategy<Value = Polynomial> {
    let modulus = field.characteristic().max(7) as i64;
    prop::collection::vec((prop::collection::vec(0u32..4, n), -modulus..modulus), 0..6).prop_map(move |ts| {
        Polynomial::from_terms(field, n, ts.into_iter().map(|(e, c)| (Monomial::from_exponents(&e), field.from_i64(c))))
    })
}

fn arb_field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rationals), Just(Field::Prime(2)), Just(Field::Prime(3)), Just(Field::Prime(5))]
}

proptest! {
    #[test]
    fn ring_axioms((a, b, c) in arb_field().prop_flat_map(|f| (arb_poly(f, 3), arb_poly(f, 3), arb_poly(f, 3)))) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &Polynomial::zero(a.field(), 3), a.clone());
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
    }

    #[test]
    fn identity_substitution(a in arb_field().prop_flat_map(|f| arb_poly(f, 3))) {
        let ids: Vec<_> = (0..3).map(|i| Polynomial::var(a.field(), 3, i)).collect();
        prop_assert_eq!(a.substitute(&ids).unwrap(), a);
    }

    #[test]
    fn leading_term_is_multiplicative((a, b) in arb_field().prop_flat_map(|f| (arb_poly(f, 3), arb_poly(f, 3)))) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (ma, ca) = a.leading_term().unwrap();
        let (mb, cb) = b.leading_term().unwrap();
        prop_assert_eq!((&a * &b).leading_term().unwrap(), (ma.mul(&mb), ca.mul(&cb)));
    }

    #[test]
    fn display_parse_roundtrip(a in arb_field().prop_flat_map(|f| arb_poly(f, 3))) {
        prop_assert_eq!(parse_polynomial(&a.to_string(), a.field(), 3).unwrap(), a);
    }

    #[test]
    fn coefficients_are_canonical(a in arb_poly(Field::Prime(5), 2)) {
        for (_, c) in a.terms() {
            let v = c.as_residue().unwrap();
            prop_assert!(v > 0 && v < 5);
        }
    }
}
