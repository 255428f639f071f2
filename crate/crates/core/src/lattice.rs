//! Rank-1 lattice rules: points, dual lattice, the R and S quality criteria
//! and component-by-component construction.
//!
//! The criteria are evaluated through the Korobov kernel
//!
//! ```text
//! K_alpha(x) = sum_{h != 0} exp(2 pi i h x) / |h|^(2 alpha)
//!            = (2 pi)^(2 alpha) (-1)^(alpha+1) / (2 alpha)! * B_(2 alpha)(x)
//! ```
//!
//! so that with `w_j(x) = 1 + gamma_j^2 K_alpha(x)`
//!
//! ```text
//! R^2 = (1/N) sum_k [ -1 + prod_j w_j({k z_j / N}) ]
//! S^2 = (1/N) sum_k prod_j w_j({k z_j / N})^2 - prod_j (1 + 2 zeta(4 alpha) gamma_j^4)
//! ```
//!
//! The second line follows from the character property applied to the
//! autocorrelation of `1/r^2`. Since every lattice point has the form
//! `(k z_j mod N)/N`, the kernel is tabulated once over the `N` residues.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index_set::{Basis, IndexSet};
use crate::points::{trig_phase, PointSet, UnitRoots};
use crate::weights::ProductWeights;
use crate::zeta::zeta;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank1Lattice {
    n: u64,
    z: Vec<u64>,
}

impl Rank1Lattice {
    pub fn new(n: u64, z: Vec<u64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("lattice modulus must be >= 2, got {n}")));
        }
        if z.is_empty() {
            return Err(Error::InvalidParameter("generating vector is empty".into()));
        }
        if let Some(&bad) = z.iter().find(|&&zj| zj == 0 || zj >= n) {
            return Err(Error::InvalidParameter(format!("component {bad} outside 1..{}", n - 1)));
        }
        Ok(Rank1Lattice { n, z })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }
}

/// The `N` points `({k z_1 / N}, ..., {k z_d / N})`, `k = 0..N`.
pub fn generate_points(lattice: &Rank1Lattice) -> PointSet {
    let n = lattice.n;
    let mut nums = Vec::with_capacity(n as usize * lattice.dim());
    for k in 0..n {
        for &zj in &lattice.z {
            nums.push(mul_mod(k, zj, n));
        }
    }
    PointSet::new(lattice.dim(), n, nums).expect("lattice points are valid by construction")
}

pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `h . z == 0 (mod N)`.
pub fn is_dual(h: &[i64], lattice: &Rank1Lattice) -> Result<bool> {
    check_dim(h.len(), lattice.dim())?;
    Ok(trig_phase(h, &lattice.z, lattice.n) == 0)
}

fn check_dim(got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Lattice average of `exp(2 pi i h.x)`: 1 on the dual lattice, 0 elsewhere.
pub fn char_sum(h: &[i64], lattice: &Rank1Lattice) -> Result<Complex64> {
    Ok(if is_dual(h, lattice)? { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// The same average computed by summing over all `N` points.
pub fn char_sum_literal(h: &[i64], lattice: &Rank1Lattice) -> Result<Complex64> {
    check_dim(h.len(), lattice.dim())?;
    let n = lattice.n;
    let roots = UnitRoots::new(n);
    // phase of point k is k * (h.z) mod N
    let step = trig_phase(h, &lattice.z, n);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += roots.get(mul_mod(k, step, n));
    }
    Ok(sum / n as f64)
}

/// Exact coefficients of `B_2` .. `B_8`, lowest degree first, as
/// numerator/denominator pairs.
const BERNOULLI: [&[(i64, i64)]; 4] = [
    &[(1, 6), (-1, 1), (1, 1)],
    &[(-1, 30), (0, 1), (1, 1), (-2, 1), (1, 1)],
    &[(1, 42), (0, 1), (-1, 2), (0, 1), (5, 2), (-3, 1), (1, 1)],
    &[(-1, 30), (0, 1), (2, 3), (0, 1), (-7, 3), (0, 1), (14, 3), (-4, 1), (1, 1)],
];

/// Bernoulli polynomial `B_degree(x)` for `degree` in {2, 4, 6, 8}.
pub fn bernoulli(degree: u32, x: f64) -> Result<f64> {
    if !matches!(degree, 2 | 4 | 6 | 8) {
        return Err(Error::InvalidParameter(format!("Bernoulli degree {degree} not tabulated")));
    }
    let coeffs = BERNOULLI[(degree / 2 - 1) as usize];
    Ok(coeffs.iter().rev().fold(0.0, |acc, &(p, q)| acc * x + p as f64 / q as f64))
}

/// `K_alpha(x) = sum_{h != 0} exp(2 pi i h x)/|h|^(2 alpha)` for integer
/// `alpha` in 1..=4, through the Bernoulli closed form.
pub fn korobov_kernel(alpha: u32, x: f64) -> Result<f64> {
    let two_alpha = 2 * alpha;
    let b = bernoulli(two_alpha, x)?;
    let factorial: f64 = (1..=two_alpha).map(|i| i as f64).product();
    let sign = if alpha % 2 == 1 { 1.0 } else { -1.0 };
    Ok((2.0 * std::f64::consts::PI).powi(two_alpha as i32) * sign / factorial * b)
}

fn supported_alpha(w: &ProductWeights) -> Result<u32> {
    match w.integer_alpha() {
        Some(a) if (1..=4).contains(&a) => Ok(a),
        _ => Err(Error::InvalidParameter(format!(
            "closed-form criteria need alpha in {{1, 2, 3, 4}}, got {}",
            w.alpha()
        ))),
    }
}

/// `K_alpha(r / N)` for every residue `r`.
fn kernel_table(alpha: u32, n: u64) -> Result<Vec<f64>> {
    (0..n).map(|r| korobov_kernel(alpha, r as f64 / n as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    R,
    S,
    RBreve,
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CriterionKind::R => "R",
            CriterionKind::S => "S",
            CriterionKind::RBreve => "Rbreve",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionValue {
    pub kind: CriterionKind,
    /// The criterion itself, the square root of `squared`.
    pub value: f64,
    pub squared: f64,
}

/// Values within this distance below zero are rounding and are clamped.
const CLAMP: f64 = 1e-9;

pub(crate) fn criterion_from_squared(kind: CriterionKind, squared: f64) -> Result<CriterionValue> {
    if squared < -CLAMP || !squared.is_finite() {
        return Err(Error::Numerical(format!("{kind} criterion squared evaluated to {squared}")));
    }
    let squared = squared.max(0.0);
    Ok(CriterionValue { kind, value: squared.sqrt(), squared })
}

/// Products `prod_j w_j(k z_j / N)` over all `k`.
fn weight_products(z: &[u64], gammas: &[f64], kernel: &[f64], n: u64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            z.iter()
                .zip(gammas)
                .map(|(&zj, &g)| 1.0 + g * g * kernel[mul_mod(k, zj, n) as usize])
                .product()
        })
        .collect()
}

fn s_offset(gammas: &[f64], alpha: u32) -> Result<f64> {
    let z4 = zeta(4.0 * alpha as f64)?;
    Ok(gammas.iter().map(|g| 1.0 + 2.0 * z4 * g.powi(4)).product())
}

pub fn r_criterion(lattice: &Rank1Lattice, w: &ProductWeights) -> Result<CriterionValue> {
    let alpha = supported_alpha(w)?;
    let n = lattice.n;
    let kernel = kernel_table(alpha, n)?;
    let products = weight_products(&lattice.z, &w.gammas(lattice.dim()), &kernel, n);
    let mean = neumaier_sum(products.iter().map(|p| p - 1.0)) / n as f64;
    criterion_from_squared(CriterionKind::R, mean)
}

pub fn s_criterion(lattice: &Rank1Lattice, w: &ProductWeights) -> Result<CriterionValue> {
    let alpha = supported_alpha(w)?;
    let n = lattice.n;
    let gammas = w.gammas(lattice.dim());
    let kernel = kernel_table(alpha, n)?;
    let products = weight_products(&lattice.z, &gammas, &kernel, n);
    let mean = neumaier_sum(products.iter().map(|p| p * p)) / n as f64;
    criterion_from_squared(CriterionKind::S, mean - s_offset(&gammas, alpha)?)
}

/// Compensated summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Index of the smallest value; values within a relative `1e-12` of the
/// running minimum count as ties and keep the earlier index. Mirror
/// candidates `z` and `N - z` give equal criteria up to summation order, so
/// an exact comparison would not be reproducible.
pub fn argmin_with_ties(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some((i, v)),
            Some((_, b)) if v < b - TIE_TOLERANCE * b.abs().max(1e-300) => best = Some((i, v)),
            _ => {}
        }
    }
    best.map(|(i, _)| i)
}

pub const TIE_TOLERANCE: f64 = 1e-12;

/// Stage-by-stage record of a CBC search.
#[derive(Debug, Clone, PartialEq)]
pub struct CbcTrace {
    /// Criterion squared after fixing each component, starting with `z_1 = 1`.
    pub stage_values: Vec<f64>,
}

/// Component-by-component construction minimizing R.
pub fn cbc_r(n: u64, d: usize, w: &ProductWeights) -> Result<Rank1Lattice> {
    cbc_rank1(n, d, w, CriterionKind::R).map(|(l, _)| l)
}

/// Component-by-component construction minimizing S.
pub fn cbc_s(n: u64, d: usize, w: &ProductWeights) -> Result<Rank1Lattice> {
    cbc_rank1(n, d, w, CriterionKind::S).map(|(l, _)| l)
}

/// Criterion squared for every candidate `z_{l+1} = 1..N-1` given the products
/// over the components fixed so far. Entry `c - 1` belongs to candidate `c`.
pub fn stage_scan(
    kind: CriterionKind,
    n: u64,
    partial: &[f64],
    gamma: f64,
    kernel: &[f64],
    offset: f64,
) -> Vec<f64> {
    let g2 = gamma * gamma;
    (1..n)
        .into_par_iter()
        .map(|c| {
            let terms = (0..n).map(|k| {
                let f = 1.0 + g2 * kernel[mul_mod(k, c, n) as usize];
                let p = partial[k as usize] * f;
                match kind {
                    CriterionKind::R => p - 1.0,
                    _ => p * p,
                }
            });
            let mean = neumaier_sum(terms) / n as f64;
            match kind {
                CriterionKind::R => mean,
                _ => mean - offset,
            }
        })
        .collect()
}

/// CBC search returning the lattice and the criterion after each stage.
pub fn cbc_rank1(
    n: u64,
    d: usize,
    w: &ProductWeights,
    kind: CriterionKind,
) -> Result<(Rank1Lattice, CbcTrace)> {
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if kind == CriterionKind::RBreve {
        return Err(Error::InvalidParameter("the Walsh criterion applies to polynomial lattices".into()));
    }
    let alpha = supported_alpha(w)?;
    let gammas = w.gammas(d);
    let kernel = kernel_table(alpha, n)?;
    let mut z = vec![1u64];
    let mut partial = weight_products(&z, &gammas[..1], &kernel, n);
    let offset_for = |s: usize| s_offset(&gammas[..s], alpha);
    let first = match kind {
        CriterionKind::R => neumaier_sum(partial.iter().map(|p| p - 1.0)) / n as f64,
        _ => neumaier_sum(partial.iter().map(|p| p * p)) / n as f64 - offset_for(1)?,
    };
    let mut stage_values = vec![first];
    for s in 1..d {
        let values = stage_scan(kind, n, &partial, gammas[s], &kernel, offset_for(s + 1)?);
        let best = argmin_with_ties(&values).expect("at least one candidate since N >= 2");
        let zs = best as u64 + 1;
        let g2 = gammas[s] * gammas[s];
        for k in 0..n {
            partial[k as usize] *= 1.0 + g2 * kernel[mul_mod(k, zs, n) as usize];
        }
        z.push(zs);
        stage_values.push(values[best]);
    }
    Ok((Rank1Lattice::new(n, z)?, CbcTrace { stage_values }))
}

/// Whether `h -> h.z mod N` is injective on `I`.
pub fn verify_reconstruction(lattice: &Rank1Lattice, set: &IndexSet) -> Result<bool> {
    check_trig(set)?;
    check_dim(set.dim(), lattice.dim())?;
    if set.len() as u64 > lattice.n {
        return Err(Error::ReconstructionImpossible { size: set.len(), n: lattice.n as usize });
    }
    let mut seen = vec![false; lattice.n as usize];
    for h in set.members() {
        let r = trig_phase(h, &lattice.z, lattice.n) as usize;
        if seen[r] {
            return Ok(false);
        }
        seen[r] = true;
    }
    Ok(true)
}

fn check_trig(set: &IndexSet) -> Result<()> {
    if set.basis() == Basis::Trig {
        Ok(())
    } else {
        Err(Error::InvalidParameter("rank-1 lattices pair with the trigonometric basis".into()))
    }
}

/// CBC search for a generating vector with the reconstruction property for
/// `I`: each stage takes the first candidate coprime to `N` whose residues
/// on the projection of `I` onto the fixed coordinates are pairwise
/// distinct. Returns `None` when some stage has no such candidate.
pub fn cbc_reconstruction(n: u64, set: &IndexSet) -> Result<Option<Rank1Lattice>> {
    check_trig(set)?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("lattice modulus must be >= 2, got {n}")));
    }
    if set.len() as u64 > n {
        return Err(Error::ReconstructionImpossible { size: set.len(), n: n as usize });
    }
    let d = set.dim();
    let mut z: Vec<u64> = Vec::with_capacity(d);
    // stamp array: slot r was hit during the scan with the given generation
    let mut stamp = vec![0u32; n as usize];
    let mut generation = 0u32;
    for s in 0..d {
        let projected = project(set, s + 1);
        // residues of the fixed part and the new coordinate, reduced mod N
        let base: Vec<u64> = projected.iter().map(|h| trig_phase(&h[..s], &z, n)).collect();
        let last: Vec<u64> = projected.iter().map(|h| h[s].rem_euclid(n as i64) as u64).collect();
        let candidates: Box<dyn Iterator<Item = u64>> =
            if s == 0 { Box::new(std::iter::once(1)) } else { Box::new(1..n) };
        let mut chosen = None;
        for c in candidates {
            if gcd(c, n) != 1 {
                continue;
            }
            generation += 1;
            let mut distinct = true;
            for (b, l) in base.iter().zip(&last) {
                let r = ((*b as u128 + *l as u128 * c as u128) % n as u128) as usize;
                if stamp[r] == generation {
                    distinct = false;
                    break;
                }
                stamp[r] = generation;
            }
            if distinct {
                chosen = Some(c);
                break;
            }
        }
        match chosen {
            Some(c) => z.push(c),
            None => return Ok(None),
        }
    }
    Ok(Some(Rank1Lattice::new(n, z)?))
}

/// Distinct projections of the members onto the first `k` coordinates.
fn project(set: &IndexSet, k: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = set.members().iter().map(|h| h[..k].to_vec()).collect();
    // members are sorted lexicographically, so equal prefixes are adjacent
    out.dedup();
    out
}
