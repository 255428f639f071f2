//! Polynomial arithmetic over prime fields.

use proptest::prelude::*;
use qmc_hyperinterp::field_poly::{is_irreducible, poly_mul_mod, FieldPoly};

fn poly(b: u32) -> impl Strategy<Value = FieldPoly> {
    prop::collection::vec(0..b, 0..8).prop_map(move |c| FieldPoly::new(b, c).unwrap())
}

fn base_and_polys() -> impl Strategy<Value = (FieldPoly, FieldPoly, FieldPoly)> {
    prop::sample::select(vec![2u32, 3, 5, 7]).prop_flat_map(|b| (poly(b), poly(b), poly(b)))
}

/// Number of monic irreducibles of degree `m` over `F_b` by the necklace formula.
fn necklace(m: u64, b: u64) -> u64 {
    let mobius = |n: u64| -> i64 {
        let (mut n, mut sign, mut p) = (n, 1i64, 2);
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                sign = -sign;
            }
            p += 1;
        }
        if n > 1 {
            sign = -sign;
        }
        sign
    };
    let total: i64 = (1..=m).filter(|d| m % d == 0).map(|d| mobius(d) * (b as i64).pow((m / d) as u32)).sum();
    (total / m as i64) as u64
}

proptest! {
    #[test]
    fn ring_laws((p, q, r) in base_and_polys()) {
        prop_assert_eq!(p.add(&q).unwrap(), q.add(&p).unwrap());
        prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap());
        prop_assert_eq!(p.mul(&q).unwrap().mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
        prop_assert_eq!(
            p.mul(&q.add(&r).unwrap()).unwrap(),
            p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap()
        );
        prop_assert!(p.sub(&p).unwrap().is_zero());
        prop_assert_eq!(p.add(&q).unwrap().sub(&q).unwrap(), p.clone());
    }

    #[test]
    fn division_identity((p, q, _r) in base_and_polys()) {
        prop_assume!(!q.is_zero());
        let (quot, rem) = p.div_rem(&q).unwrap();
        prop_assert_eq!(quot.mul(&q).unwrap().add(&rem).unwrap(), p);
        prop_assert!(rem.is_zero() || rem.degree() < q.degree());
    }

    #[test]
    fn integer_ids_round_trip(id in 0u64..100_000, b in prop::sample::select(vec![2u32, 3, 5])) {
        prop_assert_eq!(FieldPoly::from_int(id, b).to_int(), id);
    }

    #[test]
    fn reduction_is_compatible((p, q, _r) in base_and_polys()) {
        let b = p.base();
        let modulus = FieldPoly::from_int((b as u64).pow(4) + 1, b);
        let direct = p.mul(&q).unwrap().rem(&modulus).unwrap();
        prop_assert_eq!(poly_mul_mod(&p, &q, &modulus).unwrap(), direct);
    }
}

#[test]
fn irreducible_counts_match_necklace_formula() {
    for (b, max_m) in [(2u32, 10u32), (3, 6), (5, 4)] {
        for m in 1..=max_m {
            let lo = (b as u64).pow(m);
            let count = (lo..2 * lo)
                .map(|id| FieldPoly::from_int(id, b))
                .filter(|p| p.leading() == 1 && is_irreducible(p).unwrap())
                .count() as u64;
            assert_eq!(count, necklace(m as u64, b as u64), "b={b} m={m}");
        }
    }
}
