//! Spectral deviation of the discrete Gram matrix from the identity.
//!
//! For a polynomial `p = sum_h a_h q_h` over an index set `I`, the
//! equal-weight rule gives `(1/N) sum_n |p(x_n)|^2 = a* G a` with
//! `G_{h,h'} = (1/N) sum_n q_{h'}(x_n) conj(q_h(x_n))`, while the integral of
//! `|p|^2` is `a* a`. The smallest `eta` with
//! `|(1/N) sum |p|^2 - int |p|^2| <= eta int |p|^2` for all such `p` is the
//! spectral norm of `G - Id`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::points::{BasisEvaluator, PointSet};

/// Largest supported Gram dimension.
pub const MAX_GRAM_DIM: usize = 5000;
const EIGEN_FALLBACK_DIM: usize = 512;
const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaMethod {
    /// Deviation below rounding level; the Frobenius norm is reported.
    Negligible,
    PowerIteration,
    Eigendecomposition,
    /// Power iteration hit the iteration limit above the fallback size.
    Unconverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaEstimate {
    pub eta: f64,
    pub gram_dim: usize,
    pub method: EtaMethod,
}

/// Dense Gram matrix of the basis functions of `I` on `points`.
pub fn gram_matrix(points: &PointSet, set: &IndexSet) -> Result<DMatrix<Complex64>> {
    if points.dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: points.dim() });
    }
    let ev = BasisEvaluator::new(points, set.basis())?;
    let n = points.len();
    let k = set.len();
    let q = DMatrix::from_fn(n, k, |row, col| ev.value(&set.members()[col], row));
    // G_{h,h'} = (1/N) sum_n conj(q_h(x_n)) q_{h'}(x_n)
    Ok(q.adjoint() * q / Complex64::new(n as f64, 0.0))
}

pub fn estimate_eta(points: &PointSet, set: &IndexSet) -> Result<EtaEstimate> {
    let k = set.len();
    if k > MAX_GRAM_DIM {
        return Err(Error::InvalidParameter(format!(
            "|I| = {k} exceeds the dense Gram limit of {MAX_GRAM_DIM}"
        )));
    }
    if k == 0 {
        return Ok(EtaEstimate { eta: 0.0, gram_dim: 0, method: EtaMethod::Negligible });
    }
    let mut a = gram_matrix(points, set)?;
    for i in 0..k {
        a[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    Ok(spectral_norm_hermitian(&a))
}

/// Spectral norm of a Hermitian matrix.
///
/// Power iteration runs on `A^2`, which is positive semidefinite, so a
/// dominant pair `+-lambda` cannot stall it.
pub fn spectral_norm_hermitian(a: &DMatrix<Complex64>) -> EtaEstimate {
    let k = a.nrows();
    let frobenius = a.norm();
    if frobenius < TOLERANCE {
        return EtaEstimate { eta: frobenius, gram_dim: k, method: EtaMethod::Negligible };
    }
    // deterministic start vector with no special structure
    let mut v = DVector::from_fn(k, |i, _| {
        let t = (i as f64 + 1.0) * 0.618_033_988_749_894_9;
        Complex64::new(1.0 + (t - t.floor()), 0.5 * (t * 7.0).sin())
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut previous = 0.0;
    for _ in 0..MAX_ITERATIONS {
        let w = a * (a * &v);
        let rayleigh = w.dotc(&v).re; // v* A^2 v = ||A v||^2
        let norm = w.norm();
        if norm == 0.0 {
            return EtaEstimate { eta: 0.0, gram_dim: k, method: EtaMethod::PowerIteration };
        }
        v = w / Complex64::new(norm, 0.0);
        if (rayleigh - previous).abs() <= TOLERANCE * rayleigh.abs().max(1e-300) {
            let eta = (a * &v).norm();
            return EtaEstimate { eta, gram_dim: k, method: EtaMethod::PowerIteration };
        }
        previous = rayleigh;
    }
    if k <= EIGEN_FALLBACK_DIM {
        let eig = a.clone().symmetric_eigenvalues();
        let eta = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        EtaEstimate { eta, gram_dim: k, method: EtaMethod::Eigendecomposition }
    } else {
        EtaEstimate { eta: (a * &v).norm(), gram_dim: k, method: EtaMethod::Unconverged }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_set::Basis;
    use crate::lattice::{generate_points, Rank1Lattice};

    #[test]
    fn two_point_aliasing_gives_unit_eta() {
        let l = Rank1Lattice::new(2, vec![1]).unwrap();
        let set = IndexSet::from_members(Basis::Trig, 1, vec![vec![0], vec![2]]).unwrap();
        let est = estimate_eta(&generate_points(&l), &set).unwrap();
        assert!((est.eta - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reconstruction_gives_zero_eta() {
        let l = Rank1Lattice::new(3, vec![1, 2]).unwrap();
        let set = IndexSet::from_members(Basis::Trig, 2, vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let est = estimate_eta(&generate_points(&l), &set).unwrap();
        assert!(est.eta < 1e-10);
    }

    #[test]
    fn power_iteration_agrees_with_eigendecomposition() {
        // Hermitian matrix with a dominant negative eigenvalue
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                Complex64::new(-3.0, 0.0),
                Complex64::new(0.5, 0.5),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.5, -0.5),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.2, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.2, 0.0),
                Complex64::new(2.9, 0.0),
            ],
        );
        let est = spectral_norm_hermitian(&a);
        let exact = a.clone().symmetric_eigenvalues().iter().fold(0.0f64, |m, e| m.max(e.abs()));
        assert!((est.eta - exact).abs() < 1e-8, "{} vs {}", est.eta, exact);
    }
}
