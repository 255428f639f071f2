//! Finite frequency index sets: hyperbolic crosses, Minkowski sums and the
//! cardinality bounds that go with them.
//!
//! Members are stored as `i64` vectors for both bases; Walsh sets only ever
//! contain non-negative components. Enumeration visits coordinates in order
//! and, given the product of the factors already fixed, bounds the next
//! coordinate by the largest value whose own factor still fits under the
//! threshold, so nothing outside a finite box is touched. Every emitted
//! vector is finally checked with the same `r^2 <= M` test a caller would
//! use, which keeps the result independent of the pruning arithmetic.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::weights::{korobov_factor, mu1, r_korobov, r_walsh, walsh_factor, ProductWeights};
use crate::zeta::zeta;

/// Default upper limit on the number of members an enumeration may produce.
pub const DEFAULT_CAP: usize = 10_000_000;

/// Function system a frequency refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `exp(2 pi i h.x)` with `h` in `Z^d`.
    Trig,
    /// Base-`b` Walsh functions with `h` in `N_0^d`.
    Walsh(u32),
}

impl Basis {
    pub fn base(self) -> Option<u32> {
        match self {
            Basis::Trig => None,
            Basis::Walsh(b) => Some(b),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Trig => write!(f, "trig"),
            Basis::Walsh(b) => write!(f, "walsh:{b}"),
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "trig" {
            return Ok(Basis::Trig);
        }
        if let Some(b) = s.strip_prefix("walsh:") {
            let b: u32 = b.parse().map_err(|_| Error::Parse(format!("bad base in `{s}`")))?;
            check_base(b)?;
            return Ok(Basis::Walsh(b));
        }
        Err(Error::Parse(format!("unknown basis `{s}`")))
    }
}

pub(crate) fn check_base(b: u32) -> Result<()> {
    if matches!(b, 2 | 3 | 5 | 7) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("base {b} is not a supported prime")))
    }
}

/// How an index set came about.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Hyperbolic { threshold: f64, weights: ProductWeights },
    Explicit,
    Doubled,
    Differences,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    basis: Basis,
    dim: usize,
    members: Vec<Vec<i64>>,
    provenance: Provenance,
}

impl IndexSet {
    /// Builds a set from an explicit list, sorting and removing duplicates.
    pub fn from_members(basis: Basis, dim: usize, members: Vec<Vec<i64>>) -> Result<Self> {
        let mut unique = BTreeSet::new();
        for h in members {
            if h.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: h.len() });
            }
            if matches!(basis, Basis::Walsh(_)) && h.iter().any(|&c| c < 0) {
                return Err(Error::InvalidParameter(format!(
                    "Walsh frequency with a negative component: {h:?}"
                )));
            }
            unique.insert(h);
        }
        Ok(IndexSet {
            basis,
            dim,
            members: unique.into_iter().collect(),
            provenance: Provenance::Explicit,
        })
    }

    /// `{0, 1, ..., n-1}` in one dimension.
    pub fn range_1d(basis: Basis, n: i64) -> Result<Self> {
        IndexSet::from_members(basis, 1, (0..n).map(|h| vec![h]).collect())
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Vec<i64>] {
        &self.members
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn contains(&self, h: &[i64]) -> bool {
        self.members.binary_search_by(|m| m.as_slice().cmp(h)).is_ok()
    }

    /// Position of `h` in the sorted member list.
    pub fn position(&self, h: &[i64]) -> Option<usize> {
        self.members.binary_search_by(|m| m.as_slice().cmp(h)).ok()
    }

    pub fn position_map(&self) -> HashMap<Vec<i64>, usize> {
        self.members.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect()
    }

    /// Text form: header `basis d count`, then one vector per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.basis, self.dim, self.members.len());
        for h in &self.members {
            let parts: Vec<String> = h.iter().map(|c| c.to_string()).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty index set file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("bad index set header `{header}`")));
        }
        let basis: Basis = fields[0].parse()?;
        let dim: usize = fields[1].parse().map_err(|_| Error::Parse("bad dimension".into()))?;
        let count: usize = fields[2].parse().map_err(|_| Error::Parse("bad count".into()))?;
        let members = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad entry `{t}`"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if members.len() != count {
            return Err(Error::Parse(format!(
                "header announces {count} vectors, found {}",
                members.len()
            )));
        }
        let set = IndexSet::from_members(basis, dim, members)?;
        if set.len() != count {
            return Err(Error::Parse("duplicate vectors in index set file".into()));
        }
        Ok(set)
    }
}

/// Squared decay of `h` under the decay function matching `basis`.
pub fn decay_squared_le(h: &[i64], w: &ProductWeights, basis: Basis, threshold: f64) -> bool {
    match basis {
        Basis::Trig => r_korobov(h, w).squared().le(threshold),
        Basis::Walsh(b) => {
            let hu: Vec<u64> = h.iter().map(|&c| c as u64).collect();
            r_walsh(&hu, w, b).squared().le(threshold)
        }
    }
}

/// The hyperbolic cross `{h : r(h)^2 <= threshold}` in lexicographic order.
pub fn enumerate_cross(
    d: usize,
    threshold: f64,
    w: &ProductWeights,
    basis: Basis,
    cap: usize,
) -> Result<IndexSet> {
    if !(threshold >= 1.0) || !threshold.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold must be >= 1, got {threshold}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if let Basis::Walsh(b) = basis {
        check_base(b)?;
    }
    // candidate values per coordinate with their squared factors, coarse cut only
    let slack = 1.0 + 1e-9;
    let candidates: Vec<Vec<(i64, f64)>> = (1..=d)
        .map(|j| coordinate_candidates(j, threshold * slack, w, basis, cap))
        .collect::<Result<_>>()?;

    let mut members = Vec::new();
    let mut current = vec![0i64; d];
    let mut state = Enumeration { candidates: &candidates, threshold: threshold * slack, cap, w, basis, exact: threshold };
    state.descend(0, 1.0, &mut current, &mut members)?;
    Ok(IndexSet {
        basis,
        dim: d,
        members,
        provenance: Provenance::Hyperbolic { threshold, weights: w.clone() },
    })
}

struct Enumeration<'a> {
    candidates: &'a [Vec<(i64, f64)>],
    threshold: f64,
    exact: f64,
    cap: usize,
    w: &'a ProductWeights,
    basis: Basis,
}

impl Enumeration<'_> {
    fn descend(
        &mut self,
        j: usize,
        partial: f64,
        current: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) -> Result<()> {
        if j == current.len() {
            if decay_squared_le(current, self.w, self.basis, self.exact) {
                if out.len() >= self.cap {
                    return Err(Error::CardinalityCap { cap: self.cap });
                }
                out.push(current.clone());
            }
            return Ok(());
        }
        for &(value, factor_sq) in &self.candidates[j] {
            if partial * factor_sq > self.threshold {
                continue;
            }
            current[j] = value;
            self.descend(j + 1, partial * factor_sq, current, out)?;
        }
        current[j] = 0;
        Ok(())
    }
}

/// All values of coordinate `j` whose own squared factor is at most `limit`,
/// ascending, paired with that squared factor.
/// Each candidate alone (other coordinates zero) is itself a member, so a
/// list longer than `cap` already proves the cap is exceeded.
fn coordinate_candidates(
    j: usize,
    limit: f64,
    w: &ProductWeights,
    basis: Basis,
    cap: usize,
) -> Result<Vec<(i64, f64)>> {
    let gamma = w.gamma(j);
    let alpha = w.alpha();
    if gamma == 0.0 {
        return Ok(vec![(0, 1.0)]);
    }
    let too_many = |n: usize| if n > cap { Err(Error::CardinalityCap { cap }) } else { Ok(()) };
    match basis {
        Basis::Trig => {
            let mut positive = Vec::new();
            let mut h: u64 = 1;
            loop {
                let f = korobov_factor(h, alpha, gamma);
                let f2 = f * f;
                if f2 > limit {
                    break;
                }
                positive.push((h as i64, f2));
                too_many(2 * positive.len())?;
                h += 1;
            }
            let mut all: Vec<(i64, f64)> = positive.iter().rev().map(|&(h, f)| (-h, f)).collect();
            all.push((0, 1.0));
            all.extend(positive);
            Ok(all)
        }
        Basis::Walsh(b) => {
            let mut all = vec![(0, 1.0)];
            let mut level = 1u32;
            loop {
                let f = walsh_factor(level, alpha, gamma, b);
                let f2 = f * f;
                if f2 > limit {
                    break;
                }
                let lo = (b as i64).pow(level - 1);
                let hi = (b as i64).pow(level);
                too_many(hi as usize)?;
                all.extend((lo..hi).map(|h| (h, f2)));
                debug_assert!(mu1(lo as u64, b) == level);
                level += 1;
            }
            Ok(all)
        }
    }
}

/// Closed-form upper bound on the size of the hyperbolic cross.
///
/// Trigonometric: `M^l prod_j (1 + 2 gamma_j^(2l) zeta(2 alpha l))` for
/// `l > 1/(2 alpha)`. Walsh: `M^l prod_j (1 + gamma_j^2 (b-1)/(b^(2 alpha l) - b))`
/// for `1/(2 alpha) < l <= 1`.
pub fn cardinality_bound(d: usize, threshold: f64, w: &ProductWeights, lambda: f64, basis: Basis) -> Result<f64> {
    let alpha = w.alpha();
    if !(lambda > 1.0 / (2.0 * alpha)) {
        return Err(Error::InvalidParameter(format!(
            "lambda must exceed 1/(2 alpha) = {}, got {lambda}",
            1.0 / (2.0 * alpha)
        )));
    }
    let mut bound = threshold.powf(lambda);
    match basis {
        Basis::Trig => {
            let z = zeta(2.0 * alpha * lambda)?;
            for j in 1..=d {
                bound *= 1.0 + 2.0 * w.gamma(j).powf(2.0 * lambda) * z;
            }
        }
        Basis::Walsh(b) => {
            if lambda > 1.0 {
                return Err(Error::InvalidParameter(format!("Walsh bound needs lambda <= 1, got {lambda}")));
            }
            let bf = b as f64;
            let tail = (bf - 1.0) / (bf.powf(2.0 * alpha * lambda) - bf);
            for j in 1..=d {
                bound *= 1.0 + w.gamma(j).powi(2) * tail;
            }
        }
    }
    Ok(bound)
}

/// `{a + b : a, b in I}`.
pub fn minkowski_double(set: &IndexSet) -> IndexSet {
    let mut out = BTreeSet::new();
    for a in &set.members {
        for b in &set.members {
            out.insert(a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>());
        }
    }
    IndexSet {
        basis: set.basis,
        dim: set.dim,
        members: out.into_iter().collect(),
        provenance: Provenance::Doubled,
    }
}

/// Frequencies of all products `q_a * conj(q_b)` for `a, b in I`: the
/// differences `a - b` for the trigonometric basis and digit-wise
/// differences modulo `b` for Walsh.
pub fn minkowski_difference(set: &IndexSet) -> IndexSet {
    let mut out = BTreeSet::new();
    for a in &set.members {
        for c in &set.members {
            let diff: Vec<i64> = match set.basis {
                Basis::Trig => a.iter().zip(c).map(|(x, y)| x - y).collect(),
                Basis::Walsh(b) => a
                    .iter()
                    .zip(c)
                    .map(|(&x, &y)| crate::weights::digit_sub(x as u64, y as u64, b) as i64)
                    .collect(),
            };
            out.insert(diff);
        }
    }
    IndexSet {
        basis: set.basis,
        dim: set.dim,
        members: out.into_iter().collect(),
        provenance: Provenance::Differences,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::GammaRule;

    fn unit(alpha: f64) -> ProductWeights {
        ProductWeights::new(alpha, GammaRule::Constant(1.0)).unwrap()
    }

    #[test]
    fn one_dimensional_cross() {
        let set = enumerate_cross(1, 4.0, &unit(1.0), Basis::Trig, DEFAULT_CAP).unwrap();
        let expected: Vec<Vec<i64>> = (-2..=2).map(|h| vec![h]).collect();
        assert_eq!(set.members(), expected.as_slice());
    }

    #[test]
    fn two_dimensional_cross_matches_brute_force() {
        let set = enumerate_cross(2, 4.0, &unit(1.0), Basis::Trig, DEFAULT_CAP).unwrap();
        let mut brute = 0;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let r = (a.abs().max(1) * b.abs().max(1)) as f64;
                if r * r <= 4.0 {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, 21);
        assert_eq!(set.len(), 21);
    }

    #[test]
    fn threshold_one_keeps_unit_decay_vectors() {
        let w = ProductWeights::new(1.0, GammaRule::Constant(0.9)).unwrap();
        let set = enumerate_cross(3, 1.0, &w, Basis::Trig, DEFAULT_CAP).unwrap();
        assert_eq!(set.members(), &[vec![0, 0, 0]]);
        // with unit weights the vectors of +-1 entries all have r = 1
        let set = enumerate_cross(2, 1.0, &unit(1.0), Basis::Trig, DEFAULT_CAP).unwrap();
        assert_eq!(set.len(), 9);
    }

    #[test]
    fn walsh_cross_is_non_negative() {
        let set = enumerate_cross(1, 16.0, &unit(1.0), Basis::Walsh(2), DEFAULT_CAP).unwrap();
        // b^(2 mu) <= 16 gives mu <= 2, so h < 4
        assert_eq!(set.len(), 4);
        assert!(set.members().iter().all(|h| h[0] >= 0));
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_cross(2, 1e6, &unit(1.0), Basis::Trig, 100).unwrap_err();
        assert_eq!(err, Error::CardinalityCap { cap: 100 });
    }

    #[test]
    fn bound_examples() {
        let w = ProductWeights::new(1.0, GammaRule::Constant(0.0)).unwrap();
        assert_eq!(cardinality_bound(1, 1.0, &w, 1.0, Basis::Trig).unwrap(), 1.0);
        let b = cardinality_bound(1, 4.0, &unit(1.0), 1.0, Basis::Trig).unwrap();
        let expected = 4.0 + 8.0 * std::f64::consts::PI.powi(2) / 6.0;
        assert!((b - expected).abs() < 1e-12);
        assert!(cardinality_bound(1, 4.0, &unit(1.0), 0.5, Basis::Trig).is_err());
        assert!(cardinality_bound(1, 4.0, &unit(1.0), 1.5, Basis::Walsh(2)).is_err());
    }

    #[test]
    fn doubling_examples() {
        let zero = IndexSet::from_members(Basis::Trig, 1, vec![vec![0]]).unwrap();
        assert_eq!(minkowski_double(&zero).members(), &[vec![0]]);
        let three = IndexSet::from_members(Basis::Trig, 1, vec![vec![-1], vec![0], vec![1]]).unwrap();
        let doubled = minkowski_double(&three);
        assert_eq!(doubled.members(), (-2..=2).map(|h| vec![h]).collect::<Vec<_>>().as_slice());
        assert!(doubled.len() <= three.len() * three.len());
    }

    #[test]
    fn walsh_differences_use_digits() {
        let set = IndexSet::range_1d(Basis::Walsh(2), 4).unwrap();
        let diff = minkowski_difference(&set);
        assert_eq!(diff.len(), 4);
    }

    #[test]
    fn text_round_trip() {
        let w = ProductWeights::new(2.0, GammaRule::Power { scale: 1.0, exponent: 2.0 }).unwrap();
        let set = enumerate_cross(3, 300.0, &w, Basis::Trig, DEFAULT_CAP).unwrap();
        let text = set.to_text();
        let back = IndexSet::from_text(&text).unwrap();
        assert_eq!(back.members(), set.members());
        assert_eq!(back.to_text(), text);
        assert!(IndexSet::from_text("trig 1 2\n0\n").is_err());
        assert!(IndexSet::from_text("walsh:2 1 1\n-1\n").is_err());
    }
}
