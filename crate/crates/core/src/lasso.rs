//! Noise injection, soft thresholding and Lasso hyperinterpolation.
//!
//! On points where the design matrix `X` (entries `q_h(x_n)`) satisfies
//! `X* X = N Id`, the problem
//!
//! ```text
//! minimize (1/(2N)) ||y - X beta||^2 + lambda ||beta||_1
//! ```
//!
//! separates by coordinate and is solved by soft thresholding the discrete
//! inner products `X* y / N` at level `lambda`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hyperinterp::{qmc_hyperinterp, ApproxProvenance, Approximant, SampleSet};
use crate::index_set::IndexSet;
use crate::points::{BasisEvaluator, PointSet};

/// Target signal-to-noise ratio and generator seed. An infinite SNR means
/// no noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseSpec {
    /// `rms(values) / 10^(snr/20)`.
    pub fn sigma_for(&self, values: &[f64]) -> f64 {
        if self.snr_db.is_infinite() && self.snr_db > 0.0 {
            return 0.0;
        }
        let rms = (values.iter().map(|v| v * v).sum::<f64>() / values.len().max(1) as f64).sqrt();
        rms / 10f64.powf(self.snr_db / 20.0)
    }
}

/// i.i.d. `N(0, sigma^2)` draws from a seeded ChaCha stream.
pub fn gaussian_noise(len: usize, sigma: f64, seed: u64) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![0.0; len];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    (0..len).map(|_| normal.sample(&mut rng)).collect()
}

/// Noisy copy of the samples and the noise level used.
pub fn add_noise(samples: &SampleSet, spec: NoiseSpec) -> Result<(SampleSet, f64)> {
    let sigma = spec.sigma_for(samples.values());
    let noise = gaussian_noise(samples.len(), sigma, spec.seed);
    let values = samples.values().iter().zip(noise).map(|(v, e)| v + e).collect();
    Ok((samples.with_values(values)?, sigma))
}

/// `max(0, a - k) + min(0, a + k)`.
pub fn soft_threshold(a: f64, k: f64) -> f64 {
    (a - k).max(0.0) + (a + k).min(0.0)
}

/// `(|a| - k)_+ a / |a|`, zero at `a = 0`.
pub fn soft_threshold_complex(a: Complex64, k: f64) -> Complex64 {
    let r = a.norm();
    if r <= k || r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        a * ((r - k) / r)
    }
}

/// Soft thresholds every coefficient of an approximant.
pub fn shrink(approx: &Approximant, lambda: f64) -> Result<Approximant> {
    check_lambda(lambda)?;
    let coeffs = approx.coeffs().iter().map(|&c| soft_threshold_complex(c, lambda)).collect();
    Approximant::new(approx.index().clone(), coeffs, ApproxProvenance::Lasso(lambda))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")))
    }
}

/// `c_h = soft(<f, q_h>_N, lambda)`.
pub fn lasso_qmc_hyperinterp(samples: &SampleSet, set: &IndexSet, lambda: f64) -> Result<Approximant> {
    check_lambda(lambda)?;
    shrink(&qmc_hyperinterp(samples, set)?, lambda)
}

/// Draws fresh noisy samples of `f` on `points` (typically an exactness
/// rule for `I`) and applies Lasso hyperinterpolation there.
pub fn lasso_fresh_points(
    f: impl Fn(&[f64]) -> f64 + Sync,
    points: PointSet,
    set: &IndexSet,
    lambda: f64,
    noise: NoiseSpec,
) -> Result<Approximant> {
    let clean = SampleSet::from_fn(points, f)?;
    let (noisy, _) = add_noise(&clean, noise)?;
    lasso_qmc_hyperinterp(&noisy, set, lambda)
}

/// Design matrix `X_{n,h} = q_h(x_n)`.
pub fn design_matrix(points: &PointSet, set: &IndexSet) -> Result<DMatrix<Complex64>> {
    let ev = BasisEvaluator::new(points, set.basis())?;
    Ok(DMatrix::from_fn(points.len(), set.len(), |n, k| ev.value(&set.members()[k], n)))
}

/// `(1/(2N)) ||y - X beta||^2 + lambda ||beta||_1`.
pub fn lasso_objective(x: &DMatrix<Complex64>, y: &DVector<Complex64>, beta: &DVector<Complex64>, lambda: f64) -> f64 {
    let n = x.nrows() as f64;
    let resid = y - x * beta;
    resid.norm_squared() / (2.0 * n) + lambda * beta.iter().map(|b| b.norm()).sum::<f64>()
}

/// Cyclic coordinate descent for the complex Lasso with a general design.
pub fn coordinate_descent(
    x: &DMatrix<Complex64>,
    y: &DVector<Complex64>,
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> DVector<Complex64> {
    let n = x.nrows() as f64;
    let p = x.ncols();
    let col_norms: Vec<f64> = (0..p).map(|j| x.column(j).norm_squared() / n).collect();
    let mut beta = DVector::from_element(p, Complex64::new(0.0, 0.0));
    let mut resid = y.clone();
    for _ in 0..max_sweeps {
        let mut max_change = 0.0f64;
        for j in 0..p {
            if col_norms[j] == 0.0 {
                continue;
            }
            let col = x.column(j);
            // partial residual correlation with beta_j added back
            let rho = col.dotc(&resid) / n + beta[j] * col_norms[j];
            let updated = soft_threshold_complex(rho, lambda) / col_norms[j];
            let delta = updated - beta[j];
            if delta.norm() > 0.0 {
                resid -= col * delta;
                beta[j] = updated;
            }
            max_change = max_change.max(delta.norm());
        }
        if max_change < tol {
            break;
        }
    }
    beta
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    pub closed_form: Vec<Complex64>,
    pub objective: f64,
    /// Largest deviation of `X* X / N` from the identity.
    pub gram_deviation: f64,
    /// Smallest `objective(beta + delta) - objective(beta)` over the perturbations.
    pub min_perturbation_gain: f64,
    pub perturbations: usize,
    /// Largest coefficient difference to the coordinate-descent solution.
    pub descent_gap: f64,
}

impl OptimalityReport {
    pub fn certified(&self) -> bool {
        self.min_perturbation_gain >= -1e-12 && self.descent_gap <= 1e-8
    }
}

/// Closed-form Lasso solution on orthonormal-design points, checked against
/// random perturbations of norm at most 0.1 and against coordinate descent.
pub fn verify_lasso_optimality(
    samples: &SampleSet,
    set: &IndexSet,
    lambda: f64,
    perturbations: usize,
    seed: u64,
) -> Result<OptimalityReport> {
    check_lambda(lambda)?;
    let x = design_matrix(samples.points(), set)?;
    let n = x.nrows() as f64;
    let gram = x.adjoint() * &x / Complex64::new(n, 0.0);
    let mut gram_deviation = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_deviation = gram_deviation.max((gram[(i, j)] - target).norm());
        }
    }
    if gram_deviation > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "points do not give an orthonormal design (deviation {gram_deviation:e})"
        )));
    }
    let y = DVector::from_iterator(samples.len(), samples.values().iter().map(|&v| Complex64::new(v, 0.0)));
    let correlations = x.adjoint() * &y / Complex64::new(n, 0.0);
    let beta = correlations.map(|a| soft_threshold_complex(a, lambda));
    let objective = lasso_objective(&x, &y, &beta, lambda);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_gain = f64::INFINITY;
    for _ in 0..perturbations {
        let mut delta = DVector::from_fn(beta.len(), |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let radius = 0.1 * rng.random::<f64>();
        let norm = delta.norm();
        if norm > 0.0 {
            delta *= Complex64::new(radius / norm, 0.0);
        }
        let gain = lasso_objective(&x, &y, &(&beta + delta), lambda) - objective;
        min_gain = min_gain.min(gain);
    }

    let descent = coordinate_descent(&x, &y, lambda, 1e-14, 10_000);
    let descent_gap = (&descent - &beta).iter().fold(0.0f64, |m, d| m.max(d.norm()));
    Ok(OptimalityReport {
        closed_form: beta.iter().copied().collect(),
        objective,
        gram_deviation,
        min_perturbation_gain: if perturbations == 0 { 0.0 } else { min_gain },
        perturbations,
        descent_gap,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseStudy {
    pub trials: usize,
    pub sigma: f64,
    /// Mean of `||Q f_noisy - Q f||_2` over the trials.
    pub mean: f64,
    /// Mean of the squared distance.
    pub mean_sq: f64,
    /// `sigma sqrt(|I| / N)`.
    pub bound: f64,
}

impl NoiseStudy {
    pub fn mean_sq_ratio(&self) -> f64 {
        if self.bound == 0.0 {
            0.0
        } else {
            self.mean_sq / (self.bound * self.bound)
        }
    }
}

/// Monte Carlo estimate of the noise-induced coefficient error. By
/// linearity `Q(f + e) - Q f = Q e`, so only the noise is hyperinterpolated.
/// Trial `t` uses seed `seed + t`.
pub fn noise_expectation_study(
    points: &PointSet,
    set: &IndexSet,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<NoiseStudy> {
    let n = points.len();
    let bound = sigma * (set.len() as f64 / n as f64).sqrt();
    if sigma == 0.0 {
        return Ok(NoiseStudy { trials, sigma, mean: 0.0, mean_sq: 0.0, bound });
    }
    let ev = BasisEvaluator::new(points, set.basis())?;
    // conj(q_h(x_n)) / N, reused by every trial
    let rows: Vec<Vec<Complex64>> = set
        .members()
        .iter()
        .map(|h| (0..n).map(|k| ev.value(h, k).conj() / n as f64).collect())
        .collect();
    let distances: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let noise = gaussian_noise(n, sigma, seed.wrapping_add(t as u64));
            rows.iter()
                .map(|row| row.iter().zip(&noise).map(|(q, e)| q * e).sum::<Complex64>().norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mean = distances.iter().sum::<f64>() / trials as f64;
    let mean_sq = distances.iter().map(|d| d * d).sum::<f64>() / trials as f64;
    Ok(NoiseStudy { trials, sigma, mean, mean_sq, bound })
}
