//! QMC hyperinterpolation: coefficients from equal-weight discrete inner
//! products, synthesis, and L2 errors against known coefficients.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index_set::{Basis, IndexSet};
use crate::points::{basis_value_real, BasisEvaluator, PointSet};

/// Samples `f(x_n)` on a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: PointSet,
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(points: PointSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: values.len() });
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter("sample set is empty".into()));
        }
        Ok(SampleSet { points, values })
    }

    /// Samples `f` at every point.
    pub fn from_fn(points: PointSet, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self> {
        let values: Vec<f64> = (0..points.len()).into_par_iter().map(|n| f(&points.coords(n))).collect();
        SampleSet::new(points, values)
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        SampleSet::new(self.points.clone(), values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproxProvenance {
    Qmc,
    Lasso(f64),
    Classical,
}

impl fmt::Display for ApproxProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxProvenance::Qmc => write!(f, "qmc"),
            ApproxProvenance::Lasso(l) => write!(f, "lasso:{l}"),
            ApproxProvenance::Classical => write!(f, "classical"),
        }
    }
}

impl std::str::FromStr for ApproxProvenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qmc" => Ok(ApproxProvenance::Qmc),
            "classical" => Ok(ApproxProvenance::Classical),
            _ => s
                .strip_prefix("lasso:")
                .and_then(|l| l.parse().ok())
                .map(ApproxProvenance::Lasso)
                .ok_or_else(|| Error::Parse(format!("unknown provenance `{s}`"))),
        }
    }
}

/// `sum_{h in I} c_h q_h`, coefficients aligned with the members of `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximant {
    index: IndexSet,
    coeffs: Vec<Complex64>,
    provenance: ApproxProvenance,
}

impl Approximant {
    pub fn new(index: IndexSet, coeffs: Vec<Complex64>, provenance: ApproxProvenance) -> Result<Self> {
        if coeffs.len() != index.len() {
            return Err(Error::DimensionMismatch { expected: index.len(), got: coeffs.len() });
        }
        Ok(Approximant { index, coeffs, provenance })
    }

    pub fn zero(index: IndexSet) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); index.len()];
        Approximant { index, coeffs, provenance: ApproxProvenance::Qmc }
    }

    pub fn basis(&self) -> Basis {
        self.index.basis()
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn provenance(&self) -> ApproxProvenance {
        self.provenance
    }

    pub fn coefficient(&self, h: &[i64]) -> Option<Complex64> {
        self.index.position(h).map(|i| self.coeffs[i])
    }

    /// `sum |c_h|^2`, the squared L2 norm by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Value at a real point. Walsh functions read 40 digits per coordinate.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        let mut acc = CompensatedComplex::default();
        for (h, c) in self.index.members().iter().zip(&self.coeffs) {
            acc.add(c * basis_value_real(h, x, self.basis(), 40));
        }
        acc.total()
    }

    /// Value at point `n` of a rational point set, evaluated exactly.
    pub fn evaluate_at(&self, points: &PointSet, n: usize) -> Result<Complex64> {
        let ev = BasisEvaluator::new(points, self.basis())?;
        let mut acc = CompensatedComplex::default();
        for (h, c) in self.index.members().iter().zip(&self.coeffs) {
            acc.add(c * ev.value(h, n));
        }
        Ok(acc.total())
    }

    /// Text form: header `basis d |I| provenance`, then `h... re im` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.basis(), self.index.dim(), self.index.len(), self.provenance);
        for (h, c) in self.index.members().iter().zip(&self.coeffs) {
            for v in h {
                out.push_str(&v.to_string());
                out.push(' ');
            }
            out.push_str(&format!("{} {}\n", c.re, c.im));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty approximant file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("bad approximant header `{header}`")));
        }
        let basis: Basis = fields[0].parse()?;
        let dim: usize = fields[1].parse().map_err(|_| Error::Parse("bad dimension".into()))?;
        let count: usize = fields[2].parse().map_err(|_| Error::Parse("bad count".into()))?;
        let provenance: ApproxProvenance = fields[3].parse()?;
        let mut members = Vec::with_capacity(count);
        let mut coeffs = Vec::with_capacity(count);
        for line in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != dim + 2 {
                return Err(Error::Parse(format!("bad approximant line `{line}`")));
            }
            let h = tokens[..dim]
                .iter()
                .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad frequency `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{t}`")));
            members.push(h);
            coeffs.push(Complex64::new(num(tokens[dim])?, num(tokens[dim + 1])?));
        }
        if members.len() != count {
            return Err(Error::Parse(format!("header announces {count} lines, found {}", members.len())));
        }
        let index = IndexSet::from_members(basis, dim, members.clone())?;
        if index.len() != count {
            return Err(Error::Parse("duplicate frequencies".into()));
        }
        // reorder coefficients to the sorted member order
        let mut sorted = vec![Complex64::new(0.0, 0.0); count];
        for (h, c) in members.iter().zip(coeffs) {
            sorted[index.position(h).expect("member just inserted")] = c;
        }
        Approximant::new(index, sorted, provenance)
    }
}

/// Neumaier summation on both components.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedComplex {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier_step(state: &mut (f64, f64), v: f64) {
    let (sum, comp) = *state;
    let t = sum + v;
    let c = if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
    *state = (t, comp + c);
}

impl CompensatedComplex {
    pub fn add(&mut self, z: Complex64) {
        neumaier_step(&mut self.re, z.re);
        neumaier_step(&mut self.im, z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// `(1/N) sum_n v_n conj(q_h(x_n))`.
pub fn discrete_inner(samples: &SampleSet, h: &[i64], basis: Basis) -> Result<Complex64> {
    if h.len() != samples.points.dim() {
        return Err(Error::DimensionMismatch { expected: samples.points.dim(), got: h.len() });
    }
    let ev = BasisEvaluator::new(&samples.points, basis)?;
    Ok(inner_with(&ev, samples, h))
}

fn inner_with(ev: &BasisEvaluator<'_>, samples: &SampleSet, h: &[i64]) -> Complex64 {
    let mut acc = CompensatedComplex::default();
    for (n, &v) in samples.values.iter().enumerate() {
        acc.add(v * ev.value(h, n).conj());
    }
    acc.total() / samples.len() as f64
}

/// Coefficients `c_h = <f, q_h>_N` for every `h` in `I`.
pub fn qmc_hyperinterp(samples: &SampleSet, set: &IndexSet) -> Result<Approximant> {
    if set.dim() != samples.points.dim() {
        return Err(Error::DimensionMismatch { expected: samples.points.dim(), got: set.dim() });
    }
    let ev = BasisEvaluator::new(&samples.points, set.basis())?;
    let coeffs: Vec<Complex64> = set.members().par_iter().map(|h| inner_with(&ev, samples, h)).collect();
    Approximant::new(set.clone(), coeffs, ApproxProvenance::Qmc)
}

/// Real part of a value whose imaginary part must be rounding noise.
pub fn real_value(z: Complex64) -> Result<f64> {
    if z.im.abs() > 1e-8 {
        return Err(Error::Numerical(format!("imaginary residue {} exceeds 1e-8", z.im)));
    }
    Ok(z.re)
}

/// `sqrt(sum_I |fhat_h - c_h|^2 + ||f||^2 - sum_I |fhat_h|^2)`, with `fhat`
/// aligned to the members of the approximant's index set.
pub fn l2_error_analytic(approx: &Approximant, fhat: &[Complex64], f_norm_sq: f64) -> Result<f64> {
    if fhat.len() != approx.coeffs.len() {
        return Err(Error::DimensionMismatch { expected: approx.coeffs.len(), got: fhat.len() });
    }
    let inside: f64 = fhat.iter().zip(&approx.coeffs).map(|(f, c)| (f - c).norm_sqr()).sum();
    let captured: f64 = fhat.iter().map(|f| f.norm_sqr()).sum();
    let outside = f_norm_sq - captured;
    if outside < -1e-9 {
        return Err(Error::Numerical(format!(
            "coefficients carry more energy ({captured}) than the norm ({f_norm_sq})"
        )));
    }
    let radicand = inside + outside.max(0.0);
    if radicand < -1e-12 {
        return Err(Error::Numerical(format!("negative squared error {radicand}")));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Advisory comparison of `||Q f||_2` with `sqrt(1 + eta) max |f|`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub operator_norm: f64,
    pub bound: f64,
    pub margin: f64,
    pub holds: bool,
}

/// `sup_samples` are values of `f` on a dense grid standing in for the sup norm.
pub fn stability_bound_check(approx: &Approximant, eta: f64, sup_samples: &[f64]) -> StabilityReport {
    let operator_norm = approx.norm_sq().sqrt();
    let sup = sup_samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = (1.0 + eta).sqrt() * sup;
    let margin = bound - operator_norm;
    StabilityReport { operator_norm, bound, margin, holds: margin >= -1e-10 }
}
