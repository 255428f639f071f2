//! Product weights and the Korobov / Walsh decay functions.
//!
//! Every norm, quality criterion and index set in the crate is parameterized
//! by a smoothness `alpha > 1/2` and a sequence of coordinate weights
//! `gamma_j in [0, 1]`. The decay functions
//!
//! ```text
//! r(h)  = prod_{j : h_j != 0} |h_j|^alpha / gamma_j            (trigonometric)
//! r~(h) = prod_{j : h_j != 0} b^(alpha * mu1(h_j)) / gamma_j   (Walsh, base b)
//! ```
//!
//! take the value `+inf` as soon as a nonzero frequency meets a zero weight.
//! That value is carried by [`ExtendedReal::Infinite`] rather than a float
//! overflow so comparisons against it are exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A non-negative real number or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    pub fn squared(self) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(v * v),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }

    /// `1 / self^2`, which is exactly zero at infinity.
    pub fn inverse_square(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => 1.0 / (v * v),
            ExtendedReal::Infinite => 0.0,
        }
    }

    /// `self <= bound` with infinity never below a finite bound.
    pub fn le(self, bound: f64) -> bool {
        match self {
            ExtendedReal::Finite(v) => v <= bound,
            ExtendedReal::Infinite => false,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), Infinite) => Some(Ordering::Less),
            (Infinite, Finite(_)) => Some(Ordering::Greater),
            (Infinite, Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

/// Rule producing `gamma_j` for `j = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaRule {
    /// `gamma_j = c`.
    Constant(f64),
    /// `gamma_j = c * j^(-a)`.
    Power { scale: f64, exponent: f64 },
    /// Explicit values; coordinates past the end of the list get weight zero.
    Explicit(Vec<f64>),
}

impl GammaRule {
    pub fn gamma(&self, j: usize) -> f64 {
        assert!(j >= 1, "weights are indexed from 1");
        match self {
            GammaRule::Constant(c) => *c,
            GammaRule::Power { scale, exponent } => scale * (j as f64).powf(-exponent),
            GammaRule::Explicit(values) => values.get(j - 1).copied().unwrap_or(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let in_range = |g: f64| (0.0..=1.0).contains(&g);
        let ok = match self {
            GammaRule::Constant(c) => in_range(*c),
            // c * j^-a stays in [0, c] for every j iff a >= 0
            GammaRule::Power { scale, exponent } => in_range(*scale) && *exponent >= 0.0,
            GammaRule::Explicit(values) => values.iter().all(|&g| in_range(g)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("weights outside [0, 1]: {self}")))
        }
    }
}

impl fmt::Display for GammaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaRule::Constant(c) => write!(f, "const:{c}"),
            GammaRule::Power { scale, exponent } => write!(f, "pow:{scale}:{exponent}"),
            GammaRule::Explicit(values) => {
                let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "list:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for GammaRule {
    type Err = Error;

    /// Parses `const:c`, `pow:c:a` or `list:g1,g2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized gamma rule `{s}`"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let mut parts = s.splitn(2, ':');
        let kind = parts.next().ok_or_else(bad)?;
        let rest = parts.next().ok_or_else(bad)?;
        let rule = match kind {
            "const" => GammaRule::Constant(num(rest)?),
            "pow" => {
                let (c, a) = rest.split_once(':').ok_or_else(bad)?;
                GammaRule::Power { scale: num(c)?, exponent: num(a)? }
            }
            "list" => GammaRule::Explicit(rest.split(',').map(num).collect::<Result<_>>()?),
            _ => return Err(bad()),
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// Smoothness plus coordinate weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductWeights {
    alpha: f64,
    rule: GammaRule,
}

impl ProductWeights {
    pub fn new(alpha: f64, rule: GammaRule) -> Result<Self> {
        if !(alpha > 0.5) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must exceed 1/2, got {alpha}")));
        }
        rule.validate()?;
        Ok(ProductWeights { alpha, rule })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rule(&self) -> &GammaRule {
        &self.rule
    }

    /// `gamma_j` for the 1-based coordinate `j`.
    pub fn gamma(&self, j: usize) -> f64 {
        self.rule.gamma(j)
    }

    pub fn gammas(&self, d: usize) -> Vec<f64> {
        (1..=d).map(|j| self.gamma(j)).collect()
    }

    /// The smoothness as an integer, when it is one.
    pub fn integer_alpha(&self) -> Option<u32> {
        let a = self.alpha.round();
        if (self.alpha - a).abs() == 0.0 && a >= 1.0 && a <= 64.0 {
            Some(a as u32)
        } else {
            None
        }
    }
}

/// Korobov decay `r_{alpha,gamma}(h)`.
pub fn r_korobov(h: &[i64], w: &ProductWeights) -> ExtendedReal {
    let mut product = 1.0;
    for (j, &hj) in h.iter().enumerate() {
        if hj == 0 {
            continue;
        }
        let gamma = w.gamma(j + 1);
        if gamma == 0.0 {
            return ExtendedReal::Infinite;
        }
        product *= korobov_factor(hj.unsigned_abs(), w.alpha, gamma);
    }
    ExtendedReal::Finite(product)
}

pub(crate) fn korobov_factor(abs_h: u64, alpha: f64, gamma: f64) -> f64 {
    (abs_h as f64).powf(alpha) / gamma
}

/// Position of the leading base-`b` digit: the unique `c` with
/// `b^(c-1) <= h < b^c`, and 0 for `h = 0`.
pub fn mu1(h: u64, b: u32) -> u32 {
    let b = b as u64;
    let mut c = 0;
    let mut rest = h;
    while rest > 0 {
        rest /= b;
        c += 1;
    }
    c
}

/// Walsh decay `r~_{alpha,gamma}(h)` in base `b`.
pub fn r_walsh(h: &[u64], w: &ProductWeights, b: u32) -> ExtendedReal {
    let mut product = 1.0;
    for (j, &hj) in h.iter().enumerate() {
        if hj == 0 {
            continue;
        }
        let gamma = w.gamma(j + 1);
        if gamma == 0.0 {
            return ExtendedReal::Infinite;
        }
        product *= walsh_factor(mu1(hj, b), w.alpha, gamma, b);
    }
    ExtendedReal::Finite(product)
}

pub(crate) fn walsh_factor(mu: u32, alpha: f64, gamma: f64, b: u32) -> f64 {
    (b as f64).powf(alpha * mu as f64) / gamma
}

/// Digit-wise difference `h (-) k` modulo `b`.
pub fn digit_sub(h: u64, k: u64, b: u32) -> u64 {
    let b = b as u64;
    let (mut h, mut k) = (h, k);
    let mut out = 0;
    let mut place = 1;
    while h > 0 || k > 0 {
        let digit = (h % b + b - k % b) % b;
        out += digit * place;
        place *= b;
        h /= b;
        k /= b;
    }
    out
}

/// Digit-wise sum `h (+) k` modulo `b`.
pub fn digit_add(h: u64, k: u64, b: u32) -> u64 {
    let b = b as u64;
    let (mut h, mut k) = (h, k);
    let mut out = 0;
    let mut place = 1;
    while h > 0 || k > 0 {
        out += ((h % b + k % b) % b) * place;
        place *= b;
        h /= b;
        k /= b;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(alpha: f64, gammas: &[f64]) -> ProductWeights {
        ProductWeights::new(alpha, GammaRule::Explicit(gammas.to_vec())).unwrap()
    }

    #[test]
    fn korobov_examples() {
        let w = weights(2.0, &[1.0, 1.0, 1.0]);
        assert_eq!(r_korobov(&[0, 0, 0], &w), ExtendedReal::Finite(1.0));
        assert_eq!(r_korobov(&[3], &weights(2.0, &[1.0])), ExtendedReal::Finite(9.0));
        assert_eq!(r_korobov(&[2, -1], &weights(1.0, &[0.5, 0.25])), ExtendedReal::Finite(16.0));
        assert_eq!(r_korobov(&[1], &weights(1.0, &[0.0])), ExtendedReal::Infinite);
        // zero weight on an inactive coordinate is harmless
        assert_eq!(r_korobov(&[0, 2], &weights(1.0, &[0.0, 1.0])), ExtendedReal::Finite(2.0));
    }

    #[test]
    fn mu1_examples() {
        assert_eq!(mu1(0, 2), 0);
        assert_eq!(mu1(6, 2), 3);
        assert_eq!(mu1(9, 3), 3);
        assert_eq!(mu1(8, 3), 2);
        assert_eq!(mu1(1, 5), 1);
    }

    #[test]
    fn walsh_examples() {
        assert_eq!(r_walsh(&[0, 0], &weights(1.0, &[1.0, 1.0]), 2), ExtendedReal::Finite(1.0));
        assert_eq!(r_walsh(&[3], &weights(1.0, &[1.0]), 2), ExtendedReal::Finite(4.0));
        assert_eq!(r_walsh(&[1, 2], &weights(1.0, &[1.0, 0.5]), 2), ExtendedReal::Finite(16.0));
        assert_eq!(r_walsh(&[1], &weights(1.0, &[0.0]), 2), ExtendedReal::Infinite);
    }

    #[test]
    fn infinity_ordering_is_exact() {
        assert!(ExtendedReal::Finite(f64::MAX) < ExtendedReal::Infinite);
        assert!(!ExtendedReal::Infinite.le(f64::MAX));
        assert_eq!(ExtendedReal::Infinite.inverse_square(), 0.0);
    }

    #[test]
    fn gamma_rules_parse_and_print() {
        for text in ["const:0.5", "pow:1:2", "pow:0.1:4", "list:1,0.5,0.25"] {
            let rule: GammaRule = text.parse().unwrap();
            assert_eq!(rule.to_string(), text);
        }
        let rule: GammaRule = "pow:1:2".parse().unwrap();
        assert_eq!(rule.gamma(1), 1.0);
        assert_eq!(rule.gamma(2), 0.25);
        assert_eq!(rule.gamma(2), rule.gamma(2));
        assert!("pow:2:1".parse::<GammaRule>().is_err());
        assert!("pow:1:-1".parse::<GammaRule>().is_err());
        assert!("weird".parse::<GammaRule>().is_err());
    }

    #[test]
    fn alpha_must_exceed_half() {
        assert!(ProductWeights::new(0.5, GammaRule::Constant(1.0)).is_err());
        assert!(ProductWeights::new(0.51, GammaRule::Constant(1.0)).is_ok());
        let w = ProductWeights::new(4.0, GammaRule::Constant(1.0)).unwrap();
        assert_eq!(w.integer_alpha(), Some(4));
        let w = ProductWeights::new(3.5, GammaRule::Constant(1.0)).unwrap();
        assert_eq!(w.integer_alpha(), None);
    }

    #[test]
    fn digit_arithmetic() {
        assert_eq!(digit_sub(6, 3, 2), 5);
        assert_eq!(digit_add(6, 3, 2), 5);
        assert_eq!(digit_sub(5, 7, 3), digit_add(5, digit_sub(0, 7, 3), 3));
        for h in 0..50 {
            for k in 0..50 {
                assert_eq!(digit_add(digit_sub(h, k, 3), k, 3), h);
            }
        }
    }

    #[test]
    fn mu1_subadditivity_small() {
        for h in 0..256u64 {
            for k in 0..256u64 {
                assert!(mu1(h, 2) <= mu1(k, 2).max(mu1(digit_sub(h, k, 2), 2)));
            }
        }
    }
}
