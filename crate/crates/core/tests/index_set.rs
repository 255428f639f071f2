//! Hyperbolic cross enumeration and decay functions.

use qmc_hyperinterp::index_set::{enumerate_cross, DEFAULT_CAP};
use qmc_hyperinterp::weights::{r_korobov, r_walsh};
use qmc_hyperinterp::{Basis, GammaRule, IndexSet, ProductWeights};

fn box_members(d: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn korobov_oracle(h: &[i64], alpha: f64, gammas: &[f64]) -> f64 {
    h.iter().zip(gammas).filter(|(&x, _)| x != 0).map(|(&x, g)| (x.abs() as f64).powf(alpha) / g).product()
}

fn walsh_oracle(h: &[i64], alpha: f64, gammas: &[f64], b: u64) -> f64 {
    h.iter()
        .zip(gammas)
        .filter(|(&x, _)| x != 0)
        .map(|(&x, g)| {
            let digits = (0..).find(|&c| b.pow(c) > x as u64).unwrap();
            (b as f64).powf(alpha * digits as f64) / g
        })
        .product()
}

#[test]
fn trig_cross_matches_box_scan() {
    for (alpha, rule) in [(1.0, GammaRule::Constant(1.0)), (2.0, GammaRule::Power { scale: 1.0, exponent: 1.0 }), (1.5, GammaRule::Constant(0.7))] {
        let w = ProductWeights::new(alpha, rule).unwrap();
        for d in 1..=3 {
            for threshold in [1.0, 7.5, 60.0, 400.0] {
                let set = enumerate_cross(d, threshold, &w, Basis::Trig, DEFAULT_CAP).unwrap();
                let radius = 30;
                let expected: Vec<Vec<i64>> = box_members(d, -radius, radius)
                    .into_iter()
                    .filter(|h| korobov_oracle(h, alpha, &w.gammas(d)).powi(2) <= threshold * (1.0 + 1e-12))
                    .collect();
                let expected = IndexSet::from_members(Basis::Trig, d, expected).unwrap();
                assert_eq!(set.members(), expected.members(), "alpha={alpha} d={d} M={threshold}");
                for h in set.members() {
                    let r = r_korobov(h, &w).finite().unwrap();
                    assert!((r - korobov_oracle(h, alpha, &w.gammas(d))).abs() <= 1e-12 * r);
                }
            }
        }
    }
}

#[test]
fn walsh_cross_matches_box_scan() {
    for b in [2u32, 3] {
        let w = ProductWeights::new(1.0, GammaRule::Power { scale: 1.0, exponent: 0.5 }).unwrap();
        for d in 1..=3 {
            for threshold in [1.0, 20.0, 300.0, 5000.0] {
                let set = enumerate_cross(d, threshold, &w, Basis::Walsh(b), DEFAULT_CAP).unwrap();
                let expected: Vec<Vec<i64>> = box_members(d, 0, 127)
                    .into_iter()
                    .filter(|h| walsh_oracle(h, 1.0, &w.gammas(d), b as u64).powi(2) <= threshold * (1.0 + 1e-12))
                    .collect();
                let expected = IndexSet::from_members(Basis::Walsh(b), d, expected).unwrap();
                assert_eq!(set.members(), expected.members(), "b={b} d={d} M={threshold}");
                for h in set.members() {
                    let hu: Vec<u64> = h.iter().map(|&x| x as u64).collect();
                    let r = r_walsh(&hu, &w, b).finite().unwrap();
                    assert!((r - walsh_oracle(h, 1.0, &w.gammas(d), b as u64)).abs() <= 1e-12 * r);
                }
            }
        }
    }
}

#[test]
fn cross_is_lexicographic_and_symmetric() {
    let w = ProductWeights::new(2.0, GammaRule::Constant(1.0)).unwrap();
    let set = enumerate_cross(2, 500.0, &w, Basis::Trig, DEFAULT_CAP).unwrap();
    assert!(set.members().windows(2).all(|p| p[0] < p[1]));
    for h in set.members() {
        let neg: Vec<i64> = h.iter().map(|x| -x).collect();
        assert!(set.contains(&neg));
    }
}

#[test]
fn zero_weight_removes_coordinate() {
    let w = ProductWeights::new(1.0, GammaRule::Explicit(vec![1.0])).unwrap();
    let set = enumerate_cross(2, 100.0, &w, Basis::Trig, DEFAULT_CAP).unwrap();
    assert!(set.members().iter().all(|h| h[1] == 0));
    assert_eq!(set.len(), 21);
}

#[test]
fn cap_is_enforced() {
    let w = ProductWeights::new(1.0, GammaRule::Constant(1.0)).unwrap();
    assert!(enumerate_cross(3, 1e6, &w, Basis::Trig, 1000).is_err());
}
