use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triaut::sample::{random_map, random_poly, random_strict_map};
use triaut::{parse_map, parse_polynomial, Error, Field, Order, Polynomial, TriangularMap};

fn map(s: &str) -> TriangularMap {
    parse_map(s).unwrap()
}

fn poly(f: &TriangularMap, s: &str) -> Polynomial {
    parse_polynomial(s, f.field(), f.nvars()).unwrap()
}

#[test]
fn compose_examples() {
    let f = map("Q [x1 -> x1 + x2^2, x2 -> x2 + 1]");
    let id = TriangularMap::identity(Field::Rationals, 2);
    assert_eq!(f.compose(&id).unwrap(), f);
    // Substituting components: x + y^2 + (y+1)^2, y + 2.
    assert_eq!(f.compose(&f).unwrap(), map("Q [x1 -> x1 + x2^2 + x2^2 + 2*x2 + 1, x2 -> x2 + 2]"));
}

#[test]
fn inverse_examples() {
    let f = map("Q [x1 -> x1 + x2^2, x2 -> x2 + 1]");
    assert_eq!(f.inverse().unwrap(), map("Q [x1 -> x1 - x2^2 + 2*x2 - 1, x2 -> x2 - 1]"));
    let d = map("Q [x1 -> 2*x1, x2 -> 3*x2]");
    assert_eq!(d.inverse().unwrap(), map("Q [x1 -> 1/2*x1, x2 -> 1/3*x2]"));
    let id = TriangularMap::identity(Field::Prime(3), 3);
    assert_eq!(id.inverse().unwrap(), id);
}

#[test]
fn power_matches_closed_form() {
    // F^m = (x + m y + m(m-1)/2, y + m), checked against naive iteration too.
    let f = map("Q [x1 -> x1 + x2, x2 -> x2 + 1]");
    for m in -5i64..=6 {
        let expect = map(&format!("Q [x1 -> x1 + {m}*x2 + {}, x2 -> x2 + {m}]", m * (m - 1) / 2).replace("+ -", "- "));
        assert_eq!(f.power(m).unwrap(), expect, "m = {m}");
    }
    let mut naive = TriangularMap::identity(Field::Rationals, 2);
    for _ in 0..3 {
        naive = naive.compose(&f).unwrap();
    }
    assert_eq!(f.power(3).unwrap(), map("Q [x1 -> x1 + 3*x2 + 3, x2 -> x2 + 3]"));
    assert_eq!(naive, f.power(3).unwrap());

    let g = map("F2 [x1 -> x1 + x2, x2 -> x2 + 1]");
    assert_eq!(g.power(2).unwrap(), map("F2 [x1 -> x1 + 1, x2 -> x2]"));
    assert!(g.power(0).unwrap().is_identity());
}

#[test]
fn apply_examples() {
    let f = map("F2 [x1 -> x1 + x2^2*x3, x2 -> x2 + x3, x3 -> x3 + 1]");
    for i in 0..3 {
        assert_eq!(f.apply(&Polynomial::var(f.field(), 3, i)).unwrap(), f.component(i));
    }
    let t = map("F3 [x1 -> x1 + 1]");
    let inv = poly(&t, "x1^3 - x1");
    assert_eq!(t.apply(&inv).unwrap(), inv);
    let g = map("Q [x1 -> x1 + x2, x2 -> x2 + 1]");
    assert_eq!(g.apply(&poly(&g, "x1^2")).unwrap(), poly(&g, "x1^2 + 2*x1*x2 + x2^2"));
}

#[test]
fn operator_examples() {
    let t = map("F3 [x1 -> x1 + 1]");
    assert!(t.op_n(&poly(&t, "x1^3 - x1")).unwrap().is_zero());
    // x^2 + (x+1)^2 + (x+2)^2 = 3x^2 + 6x + 5 = 2 mod 3.
    assert_eq!(t.op_m(1, &poly(&t, "x1^2")).unwrap(), poly(&t, "2"));
    let g = map("F2 [x1 -> x1 + x2, x2 -> x2 + 1]");
    assert_eq!(g.op_m(2, &poly(&g, "x2")).unwrap(), poly(&g, "1"));
    let q = map("Q [x1 -> x1 + 1]");
    assert!(matches!(q.op_m(1, &poly(&q, "x1")), Err(Error::CharZeroM)));
}

#[test]
fn order_examples() {
    assert_eq!(TriangularMap::identity(Field::Prime(5), 2).order_charp().unwrap(), 1);
    assert_eq!(map("F2 [x1 -> x1 + x2, x2 -> x2 + 1]").order_charp().unwrap(), 4);
    // Iteration oracle: the smallest k with F^k = I by naive composition.
    let f = map("F2 [x1 -> x1 + x2^2*x3, x2 -> x2 + x3, x3 -> x3 + 1]");
    let mut g = f.clone();
    let mut k = 1;
    while !g.is_identity() {
        g = g.compose(&f).unwrap();
        k += 1;
    }
    assert_eq!(k, 8);
    assert_eq!(f.order_charp().unwrap(), 8);
    assert!(matches!(map("F3 [x1 -> 2*x1]").order_charp(), Err(Error::NotStrictlyTriangular)));
    assert!(matches!(map("Q [x1 -> x1 + 1]").order_charp(), Err(Error::CharZero { .. })));
}

/// Independent brute-force cycle walk on integer tuples.
fn brute_perm_order(p: u64, f: impl Fn(&[u64]) -> Vec<u64>, n: usize) -> u64 {
    let total = p.pow(n as u32);
    let mut order = 1u64;
    for idx in 0..total {
        let start: Vec<u64> = (0..n).map(|k| (idx / p.pow((n - 1 - k) as u32)) % p).collect();
        let mut cur = f(&start);
        let mut len = 1;
        while cur != start {
            cur = f(&cur);
            len += 1;
        }
        order = order / gcd(order, len) * len;
    }
    order
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn perm_order_examples() {
    assert_eq!(TriangularMap::identity(Field::Prime(3), 2).perm_order().unwrap(), 1);
    assert_eq!(map("F5 [x1 -> x1 + 1]").perm_order().unwrap(), 5);
    // The three-variable example: on points of F_2^3 the order is 8, the same as
    // its symbolic order (not 4).
    let f = map("F2 [x1 -> x1 + x2^2*x3, x2 -> x2 + x3, x3 -> x3 + 1]");
    let brute = brute_perm_order(2, |v| vec![(v[0] + v[1] * v[1] * v[2]) % 2, (v[1] + v[2]) % 2, (v[2] + 1) % 2], 3);
    assert_eq!(brute, 8);
    assert_eq!(f.perm_order().unwrap(), brute as u128);
    assert!(matches!(
        TriangularMap::identity(Field::Prime(2_147_483_647), 2).perm_order(),
        Err(Error::TooManyPoints { .. })
    ));
}

#[test]
fn group_and_action_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for field in [Field::Rationals, Field::Prime(2), Field::Prime(3), Field::Prime(5)] {
        for _ in 0..15 {
            let n = 3;
            let (a, b, c) = (
                random_map(&mut rng, field, n, 3, 3),
                random_map(&mut rng, field, n, 3, 3),
                random_map(&mut rng, field, n, 3, 3),
            );
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            assert_eq!(left, right);
            let inv = a.inverse().unwrap();
            assert!(a.compose(&inv).unwrap().is_identity());
            assert!(inv.compose(&a).unwrap().is_identity());

            let g = random_poly(&mut rng, field, n, 0, 3, 4);
            let h = random_poly(&mut rng, field, n, 0, 3, 4);
            assert_eq!(a.apply(&g.mul(&h)).unwrap(), a.apply(&g).unwrap().mul(&a.apply(&h).unwrap()));
        }
    }
}

#[test]
fn strictly_triangular_maps_have_p_power_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in [2u32, 3, 5] {
        let field = Field::Prime(p);
        for k in 0..100 {
            let n = 1 + k % 4;
            let f = random_strict_map(&mut rng, field, n, 3, 3);
            let order = f.order_charp().unwrap();
            assert!(f.power_u(order).unwrap().is_identity());
            assert!(f.power_u((p as u128).pow(n as u32)).unwrap().is_identity());
            let fp = f.power_u(p as u128).unwrap();
            assert_eq!(fp.component(n - 1), Polynomial::var(field, n, n - 1));
        }
    }
}

#[test]
fn m_is_a_power_of_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in [2u32, 3] {
        let field = Field::Prime(p);
        for _ in 0..10 {
            let f = random_strict_map(&mut rng, field, 2, 3, 3);
            let g = random_poly(&mut rng, field, 2, 0, 4, 4);
            let mut t = g.clone();
            for _ in 0..(p * p - 1) {
                t = f.op_n(&t).unwrap();
            }
            assert_eq!(f.op_m(1, &g).unwrap(), t);
        }
    }
}

#[test]
fn m_is_linear_over_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let field = Field::Prime(3);
    for _ in 0..10 {
        let f = random_strict_map(&mut rng, field, 2, 3, 3);
        // F^(p^n)-orbit products are invariant; so is the norm-like x^p - ... ;
        // take an orbit product of x2 which is always invariant.
        let mut inv = Polynomial::one(field, 2);
        let order = f.order_charp().unwrap();
        let mut t = Polynomial::var(field, 2, 1);
        for _ in 0..order {
            inv = inv.mul(&t);
            t = f.apply(&t).unwrap();
        }
        assert_eq!(f.apply(&inv).unwrap(), inv);
        let g = random_poly(&mut rng, field, 2, 0, 3, 3);
        assert_eq!(f.op_m(1, &inv.mul(&g)).unwrap(), inv.mul(&f.op_m(1, &g).unwrap()));
    }
}

#[test]
fn perm_order_divides_symbolic_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for p in [2u32, 3, 5] {
        for _ in 0..10 {
            let f = random_strict_map(&mut rng, Field::Prime(p), 3, 4, 3);
            assert_eq!(f.order_charp().unwrap() % f.perm_order().unwrap(), 0);
        }
    }
}

#[test]
fn order_of_general_maps() {
    assert_eq!(map("F3 [x1 -> 2*x1 + x2, x2 -> x2 + 1]").order().unwrap(), Order::Finite(6));
}

#[test]
fn map_text_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for field in [Field::Rationals, Field::Prime(7)] {
        for _ in 0..20 {
            let f = random_map(&mut rng, field, 3, 4, 4);
            assert_eq!(parse_map(&f.to_string()).unwrap(), f);
        }
    }
}
