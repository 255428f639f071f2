//! Hyperinterpolation and orthonormality on exactness rules.

use num_complex::Complex64;
use qmc_hyperinterp::gram::gram_matrix;
use qmc_hyperinterp::hyperinterp::{l2_error_analytic, qmc_hyperinterp, SampleSet};
use qmc_hyperinterp::index_set::{enumerate_cross, DEFAULT_CAP};
use qmc_hyperinterp::lattice::{cbc_reconstruction, generate_points, next_prime, Rank1Lattice};
use qmc_hyperinterp::points::PointSet;
use qmc_hyperinterp::poly_lattice::{cbc_poly, generate_poly_points};
use qmc_hyperinterp::testbed::TestFunction;
use qmc_hyperinterp::{Basis, GammaRule, IndexSet, ProductWeights};

fn recon_lattice(set: &IndexSet) -> Rank1Lattice {
    let mut n = next_prime(set.len() as u64);
    loop {
        if let Some(l) = cbc_reconstruction(n, set).unwrap() {
            return l;
        }
        n = next_prime(n + 1);
    }
}

/// Largest entry of `G - Id` for the Gram matrix of `set` on `points`.
fn identity_deviation(points: &PointSet, set: &IndexSet) -> f64 {
    let g = gram_matrix(points, set).unwrap();
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

#[test]
fn walsh_functions_orthonormal_on_polynomial_lattice() {
    let w = ProductWeights::new(1.0, GammaRule::Constant(1.0)).unwrap();
    let lattice = cbc_poly(8, 2, &w, 2, None).unwrap();
    let points = generate_poly_points(&lattice).unwrap();
    // digit-reversal duality: frequencies below b^m in the first coordinate only
    let set = IndexSet::from_members(Basis::Walsh(2), 2, (0..256).map(|h| vec![h, 0]).collect()).unwrap();
    assert!(identity_deviation(&points, &set) < 1e-12);
    let grid = PointSet::grid_1d(64);
    let set = IndexSet::range_1d(Basis::Walsh(2), 64).unwrap();
    assert!(identity_deviation(&grid, &set) < 1e-12);
}

#[test]
fn exact_for_members_of_the_span() {
    let w = ProductWeights::new(2.0, GammaRule::Power { scale: 1.0, exponent: 1.0 }).unwrap();
    let set = enumerate_cross(2, 400.0, &w, Basis::Trig, DEFAULT_CAP).unwrap();
    let lattice = recon_lattice(&set);
    let target = [vec![0i64, 0], vec![1, -1], vec![-1, 1], vec![3, 0], vec![-3, 0]];
    let coeffs = [0.5, 0.25, 0.25, -0.1, -0.1];
    let f = |x: &[f64]| -> f64 {
        target
            .iter()
            .zip(coeffs)
            .map(|(h, c)| c * (2.0 * std::f64::consts::PI * (h[0] as f64 * x[0] + h[1] as f64 * x[1])).cos())
            .sum()
    };
    let samples = SampleSet::from_fn(generate_points(&lattice), f).unwrap();
    let approx = qmc_hyperinterp(&samples, &set).unwrap();
    for h in set.members() {
        let expected = target.iter().zip(coeffs).find(|(t, _)| *t == h).map_or(0.0, |(_, c)| c);
        assert!((approx.coefficient(h).unwrap() - Complex64::new(expected, 0.0)).norm() < 1e-13, "{h:?}");
    }
}

#[test]
fn analytic_error_matches_norm_identity() {
    // ||f - p||^2 = ||f||^2 - 2 Re<f, p> + ||p||^2 for p in span(I)
    let f = TestFunction::parse("kv", 2, None).unwrap();
    let w = ProductWeights::new(2.0, GammaRule::Constant(1.0)).unwrap();
    let set = enumerate_cross(2, 2000.0, &w, Basis::Trig, DEFAULT_CAP).unwrap();
    let lattice = recon_lattice(&set);
    let samples = SampleSet::from_fn(generate_points(&lattice), |x| f.eval(x)).unwrap();
    let approx = qmc_hyperinterp(&samples, &set).unwrap();
    let fhat = f.coefficients(&set);
    let cross: f64 = approx.coeffs().iter().zip(&fhat).map(|(c, g)| (c.conj() * g).re).sum();
    let expected = (f.norm_sq() - 2.0 * cross + approx.norm_sq()).sqrt();
    let got = l2_error_analytic(&approx, &fhat, f.norm_sq()).unwrap();
    assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    // aliasing makes the approximation worse than truncation
    let truncation = (f.norm_sq() - fhat.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
    assert!(got >= truncation - 1e-14);
}

#[test]
fn approximant_text_round_trip() {
    let w = ProductWeights::new(1.0, GammaRule::Constant(1.0)).unwrap();
    let set = enumerate_cross(1, 30.0, &w, Basis::Trig, DEFAULT_CAP).unwrap();
    let lattice = recon_lattice(&set);
    let samples = SampleSet::from_fn(generate_points(&lattice), |x| (x[0] * 7.0).sin()).unwrap();
    let approx = qmc_hyperinterp(&samples, &set).unwrap();
    let back = qmc_hyperinterp::hyperinterp::Approximant::from_text(&approx.to_text()).unwrap();
    assert_eq!(back.index().members(), approx.index().members());
    for (a, b) in back.coeffs().iter().zip(approx.coeffs()) {
        assert_eq!(a, b);
    }
}
