//! Test functions with exact coefficient oracles.
//!
//! The smooth product function has the univariate factor
//!
//! ```text
//! g(x) = c [4 + sgn(x - 1/2) (sin^3(2 pi x) + sin^4(2 pi x))]
//! c    = 8 sqrt(6) sqrt(pi) / sqrt(6369 pi - 4096)
//! ```
//!
//! normalized so that `||g||_2 = 1`. Writing `sin^3 + sin^4` as a short
//! trigonometric polynomial `sum_k a_k e_k` and using
//! `int_0^1 sgn(x - 1/2) e^(2 pi i n x) dx = 2/(pi i n)` for odd `n` (zero for
//! even `n`) gives every Fourier coefficient in closed form.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index_set::{Basis, IndexSet};
use crate::points::{basis_value_real, walsh_exponent};
use crate::weights::GammaRule;

/// Normalizing constant of the univariate factor.
pub fn kv_constant() -> f64 {
    8.0 * 6f64.sqrt() * PI.sqrt() / (6369.0 * PI - 4096.0).sqrt()
}

pub fn kv_factor(x: f64) -> f64 {
    let s = (2.0 * PI * x).sin();
    let sign = if x > 0.5 {
        1.0
    } else if x < 0.5 {
        -1.0
    } else {
        0.0
    };
    kv_constant() * (4.0 + sign * (s.powi(3) + s.powi(4)))
}

/// Fourier coefficients of `sin^3(2 pi x) + sin^4(2 pi x)` at `k = -4..=4`.
fn sine_power_coefficients() -> [(i64, Complex64); 9] {
    let i = Complex64::new(0.0, 1.0);
    let r = |v: f64| Complex64::new(v, 0.0);
    [
        (-4, r(1.0 / 16.0)),
        (-3, r(1.0 / 8.0) / i),
        (-2, r(-0.25)),
        (-1, r(-3.0 / 8.0) / i),
        (0, r(3.0 / 8.0)),
        (1, r(3.0 / 8.0) / i),
        (2, r(-0.25)),
        (3, r(-1.0 / 8.0) / i),
        (4, r(1.0 / 16.0)),
    ]
}

/// `int_0^1 sgn(x - 1/2) e^(2 pi i n x) dx`.
fn sign_integral(n: i64) -> Complex64 {
    if n % 2 == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(2.0 / (PI * n as f64), 0.0) / Complex64::new(0.0, 1.0)
    }
}

/// `int_0^1 g(x) e^(-2 pi i h x) dx`.
pub fn kv_fourier(h: i64) -> Complex64 {
    let mut sum = Complex64::new(if h == 0 { 4.0 } else { 0.0 }, 0.0);
    for (k, a) in sine_power_coefficients() {
        sum += a * sign_integral(k - h);
    }
    sum * kv_constant()
}

/// Multivariate test functions with coefficient oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `prod_j g(x_j)`.
    Kv { dim: usize },
    /// `prod_j (1 + omega_j g(x_j))`.
    KvWeighted { dim: usize, omega: GammaRule },
    /// Piecewise constant `+-1` on the 16 dyadic cells of `[0,1)`.
    SquareWave,
}

/// Cell values of the square wave on `[k/16, (k+1)/16)`.
pub const SQUARE_WAVE_CELLS: [f64; 16] =
    [1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];

pub fn square_wave(x: f64) -> f64 {
    let cell = ((x.rem_euclid(1.0)) * 16.0).floor() as usize;
    SQUARE_WAVE_CELLS[cell.min(15)]
}

/// Base-2 Walsh coefficient of the square wave, exact (a finite sum of
/// `+-1/16` terms) and zero for `h >= 16`.
pub fn square_wave_walsh(h: u64) -> f64 {
    if h >= 16 {
        return 0.0;
    }
    let mut sum = 0.0;
    for (cell, &v) in SQUARE_WAVE_CELLS.iter().enumerate() {
        let e = walsh_exponent(h, cell as u64, 4, 2) % 2;
        sum += if e == 0 { v } else { -v };
    }
    sum / 16.0
}

impl TestFunction {
    pub fn parse(name: &str, dim: usize, omega: Option<GammaRule>) -> Result<Self> {
        match name {
            "kv" => Ok(TestFunction::Kv { dim }),
            "kv_weighted" => Ok(TestFunction::KvWeighted {
                dim,
                omega: omega.unwrap_or(GammaRule::Power { scale: 1.0, exponent: 8.0 }),
            }),
            "square" => {
                if dim != 1 {
                    return Err(Error::InvalidParameter("the square wave is one-dimensional".into()));
                }
                Ok(TestFunction::SquareWave)
            }
            _ => Err(Error::InvalidParameter(format!("unknown test function `{name}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Kv { .. } => "kv",
            TestFunction::KvWeighted { .. } => "kv_weighted",
            TestFunction::SquareWave => "square",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Kv { dim } | TestFunction::KvWeighted { dim, .. } => *dim,
            TestFunction::SquareWave => 1,
        }
    }

    /// Basis in which the coefficient oracle is expressed.
    pub fn basis(&self) -> Basis {
        match self {
            TestFunction::SquareWave => Basis::Walsh(2),
            _ => Basis::Trig,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Kv { .. } => x.iter().map(|&xj| kv_factor(xj)).product(),
            TestFunction::KvWeighted { omega, .. } => x
                .iter()
                .enumerate()
                .map(|(j, &xj)| 1.0 + omega.gamma(j + 1) * kv_factor(xj))
                .product(),
            TestFunction::SquareWave => square_wave(x[0]),
        }
    }

    pub fn coefficient(&self, h: &[i64]) -> Complex64 {
        match self {
            TestFunction::Kv { .. } => h.iter().map(|&hj| kv_fourier(hj)).product(),
            TestFunction::KvWeighted { omega, .. } => h
                .iter()
                .enumerate()
                .map(|(j, &hj)| {
                    let delta = if hj == 0 { 1.0 } else { 0.0 };
                    Complex64::new(delta, 0.0) + omega.gamma(j + 1) * kv_fourier(hj)
                })
                .product(),
            TestFunction::SquareWave => Complex64::new(square_wave_walsh(h[0].max(0) as u64), 0.0),
        }
    }

    pub fn coefficients(&self, set: &IndexSet) -> Vec<Complex64> {
        set.members().iter().map(|h| self.coefficient(h)).collect()
    }

    /// `||f||_2^2`.
    pub fn norm_sq(&self) -> f64 {
        match self {
            TestFunction::Kv { .. } | TestFunction::SquareWave => 1.0,
            TestFunction::KvWeighted { dim, omega } => {
                let g0 = kv_fourier(0).re;
                (1..=*dim)
                    .map(|j| {
                        let w = omega.gamma(j);
                        1.0 + 2.0 * w * g0 + w * w
                    })
                    .product()
            }
        }
    }
}

/// Text cache of coefficients: a header line with the tolerance, then
/// `name h re im` records.
pub fn coefficient_cache_text(name: &str, values: &[(i64, Complex64)], tolerance: f64) -> String {
    let mut out = format!("# tolerance={tolerance}\n");
    for (h, c) in values {
        out.push_str(&format!("{name} {h} {} {}\n", c.re, c.im));
    }
    out
}

pub fn parse_coefficient_cache(text: &str) -> Result<BTreeMap<(String, i64), Complex64>> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 4 {
            return Err(Error::Parse(format!("bad cache line `{line}`")));
        }
        let bad = || Error::Parse(format!("bad cache line `{line}`"));
        let h: i64 = t[1].parse().map_err(|_| bad())?;
        let re: f64 = t[2].parse().map_err(|_| bad())?;
        let im: f64 = t[3].parse().map_err(|_| bad())?;
        out.insert((t[0].to_string(), h), Complex64::new(re, im));
    }
    Ok(out)
}

/// Walsh synthesis of the square wave from its 16 coefficients.
pub fn square_wave_synthesis(x: f64) -> f64 {
    (0..16u64)
        .map(|h| square_wave_walsh(h) * basis_value_real(&[h as i64], &[x], Basis::Walsh(2), 40).re)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_factor_examples() {
        let c = kv_constant();
        assert_eq!(kv_factor(0.5), 4.0 * c);
        assert!((kv_factor(0.0) - 4.0 * c).abs() < 1e-15);
    }

    #[test]
    fn conjugate_symmetry() {
        for h in 0..50 {
            assert!((kv_fourier(-h) - kv_fourier(h).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn mean_value_closed_form() {
        let c = kv_constant();
        assert!((kv_fourier(0).re - c * (4.0 - 4.0 / (3.0 * PI))).abs() < 1e-15);
    }

    #[test]
    fn square_wave_parseval_and_support() {
        let energy: f64 = (0..16).map(|h| square_wave_walsh(h).powi(2)).sum();
        assert!((energy - 1.0).abs() < 1e-15);
        assert_eq!(square_wave_walsh(16), 0.0);
        assert_eq!(square_wave_walsh(1000), 0.0);
        for k in 0..256 {
            let x = k as f64 / 256.0;
            assert!((square_wave_synthesis(x) - square_wave(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_degenerate_cases() {
        let f = TestFunction::KvWeighted { dim: 3, omega: GammaRule::Constant(0.0) };
        assert_eq!(f.eval(&[0.1, 0.7, 0.3]), 1.0);
        assert_eq!(f.norm_sq(), 1.0);
        let g = TestFunction::KvWeighted { dim: 1, omega: GammaRule::Constant(1.0) };
        assert!((g.eval(&[0.3]) - (1.0 + kv_factor(0.3))).abs() < 1e-15);
    }

    #[test]
    fn cache_round_trip() {
        let values: Vec<(i64, Complex64)> = (-3..=3).map(|h| (h, kv_fourier(h))).collect();
        let text = coefficient_cache_text("kv", &values, 1e-12);
        let parsed = parse_coefficient_cache(&text).unwrap();
        for (h, c) in values {
            assert_eq!(parsed[&("kv".to_string(), h)], c);
        }
    }
}
