//! Exact rational point sets and evaluation of the two basis systems on them.
//!
//! Every point produced by a lattice or polynomial lattice rule has
//! coordinates `num / den` with a common denominator (`N`, or `b^m`). The
//! numerators are kept as integers so that trigonometric phases reduce to an
//! integer residue modulo `den` and Walsh values to an integer exponent modulo
//! `b`; only the final lookup touches floating point.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::index_set::Basis;

/// `N` points in `[0,1)^d` with coordinates `nums[n*d + j] / den`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    den: u64,
    nums: Vec<u64>,
}

impl PointSet {
    pub fn new(dim: usize, den: u64, nums: Vec<u64>) -> Result<Self> {
        if dim == 0 || den == 0 {
            return Err(Error::InvalidParameter("point sets need d >= 1 and a positive denominator".into()));
        }
        if nums.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, got: nums.len() % dim });
        }
        if nums.iter().any(|&v| v >= den) {
            return Err(Error::InvalidParameter("coordinate outside [0,1)".into()));
        }
        Ok(PointSet { dim, den, nums })
    }

    /// The full grid `{k / den}` in one dimension.
    pub fn grid_1d(den: u64) -> Self {
        PointSet { dim: 1, den, nums: (0..den).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn len(&self) -> usize {
        self.nums.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    /// Numerators of point `n`.
    pub fn numerators(&self, n: usize) -> &[u64] {
        &self.nums[n * self.dim..(n + 1) * self.dim]
    }

    pub fn coords(&self, n: usize) -> Vec<f64> {
        self.numerators(n).iter().map(|&v| v as f64 / self.den as f64).collect()
    }

    pub fn iter_coords(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |n| self.coords(n))
    }
}

/// `exp(2 pi i k / n)` for residues `k` modulo `n`, tabulated when `n` is small.
#[derive(Debug, Clone)]
pub struct UnitRoots {
    n: u64,
    table: Option<Vec<Complex64>>,
}

const TABLE_LIMIT: u64 = 1 << 22;

impl UnitRoots {
    pub fn new(n: u64) -> Self {
        let table = (n <= TABLE_LIMIT).then(|| (0..n).map(|k| root(k, n)).collect());
        UnitRoots { n, table }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn get(&self, k: u64) -> Complex64 {
        let k = k % self.n;
        match &self.table {
            Some(t) => t[k as usize],
            None => root(k, self.n),
        }
    }
}

/// `exp(2 pi i k / n)`, exact at the quarter turns.
fn root(k: u64, n: u64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 4 * k % n == 0 {
        return match 4 * k / n {
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// Evaluates basis functions `q_h` on the points of one [`PointSet`].
pub struct BasisEvaluator<'a> {
    points: &'a PointSet,
    basis: Basis,
    roots: UnitRoots,
    /// Walsh only: numerators with their `m` digits reversed, so that the
    /// exponent of `wal_h` is the digit-wise dot product with `h`.
    reversed: Vec<u64>,
}

impl<'a> BasisEvaluator<'a> {
    pub fn new(points: &'a PointSet, basis: Basis) -> Result<Self> {
        let (roots, reversed) = match basis {
            Basis::Trig => (UnitRoots::new(points.den), Vec::new()),
            Basis::Walsh(b) => {
                let m = exact_log(points.den, b).ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "Walsh evaluation needs a denominator that is a power of {b}, got {}",
                        points.den
                    ))
                })?;
                let reversed = points.nums.iter().map(|&num| reverse_digits(num, m, b)).collect();
                (UnitRoots::new(b as u64), reversed)
            }
        };
        Ok(BasisEvaluator { points, basis, roots, reversed })
    }

    /// Integer phase of `q_h` at point `n`, relative to [`Self::phase_modulus`].
    pub fn phase(&self, h: &[i64], n: usize) -> u64 {
        match self.basis {
            Basis::Trig => trig_phase(h, self.points.numerators(n), self.points.den),
            Basis::Walsh(b) => {
                let d = self.points.dim;
                let r = &self.reversed[n * d..(n + 1) * d];
                if b == 2 {
                    let ones: u32 = h.iter().zip(r).map(|(&hj, &rj)| (hj as u64 & rj).count_ones()).sum();
                    return (ones % 2) as u64;
                }
                let b = b as u64;
                let mut e = 0u64;
                for (&hj, &rj) in h.iter().zip(r) {
                    let (mut hh, mut rr) = (hj as u64, rj);
                    while hh > 0 && rr > 0 {
                        e += (hh % b) * (rr % b);
                        hh /= b;
                        rr /= b;
                    }
                }
                e % b
            }
        }
    }

    pub fn phase_modulus(&self) -> u64 {
        self.roots.modulus()
    }

    /// `q_h(x_n)`.
    pub fn value(&self, h: &[i64], n: usize) -> Complex64 {
        self.roots.get(self.phase(h, n))
    }
}

/// The `m`-digit base-`b` reversal of `num < b^m`.
fn reverse_digits(num: u64, m: u32, b: u32) -> u64 {
    let b = b as u64;
    let (mut num, mut out) = (num, 0u64);
    for _ in 0..m {
        out = out * b + num % b;
        num /= b;
    }
    out
}

/// `h . x` modulo `den` for integer numerators `x`.
pub fn trig_phase(h: &[i64], x: &[u64], den: u64) -> u64 {
    if den <= u32::MAX as u64 {
        // every product of two residues fits in u64
        let mut acc = 0u64;
        for (&hj, &xj) in h.iter().zip(x) {
            acc = (acc + hj.rem_euclid(den as i64) as u64 * (xj % den)) % den;
        }
        return acc;
    }
    let den128 = den as i128;
    let mut acc: i128 = 0;
    for (&hj, &xj) in h.iter().zip(x) {
        acc = (acc + (hj as i128).rem_euclid(den128) * xj as i128) % den128;
    }
    acc as u64
}

/// `sum_k h_k x_{k+1}` (not reduced) for `x = num / b^m`, where `h_k` are
/// the base-`b` digits of `h` from the least significant end and `x_i` the
/// digits of `x` after the radix point.
pub fn walsh_exponent(h: u64, num: u64, m: u32, b: u32) -> u64 {
    let b = b as u64;
    let mut h = h;
    let mut e = 0;
    // x_{k+1} is the digit of num at place b^(m-1-k)
    let mut place = m;
    while h > 0 && place > 0 {
        place -= 1;
        let xk = (num / b.pow(place)) % b;
        e += (h % b) * xk;
        h /= b;
    }
    e
}

/// `m` with `b^m = n`, if any.
pub fn exact_log(n: u64, b: u32) -> Option<u32> {
    let b = b as u64;
    let mut m = 0;
    let mut v = 1u64;
    while v < n {
        v = v.checked_mul(b)?;
        m += 1;
    }
    (v == n).then_some(m)
}

/// `q_h(x)` at an arbitrary real point. Walsh functions read `depth` base-`b`
/// digits of each coordinate, which is exact for points with finite expansions
/// of that length.
pub fn basis_value_real(h: &[i64], x: &[f64], basis: Basis, depth: u32) -> Complex64 {
    match basis {
        Basis::Trig => {
            let mut phase = 0.0;
            for (&hj, &xj) in h.iter().zip(x) {
                // reduce each term to keep the argument small
                phase += (hj as f64 * xj).rem_euclid(1.0);
            }
            let (s, c) = (2.0 * PI * phase).sin_cos();
            Complex64::new(c, s)
        }
        Basis::Walsh(b) => {
            let mut e = 0u64;
            for (&hj, &xj) in h.iter().zip(x) {
                let mut frac = xj.rem_euclid(1.0);
                let mut hd = hj as u64;
                for _ in 0..depth {
                    if hd == 0 {
                        break;
                    }
                    frac *= b as f64;
                    let digit = frac.floor();
                    frac -= digit;
                    e += (hd % b as u64) * digit as u64;
                    hd /= b as u64;
                }
            }
            root(e % b as u64, b as u64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_roots_are_exact_at_quarter_turns() {
        let r = UnitRoots::new(8);
        assert_eq!(r.get(0), Complex64::new(1.0, 0.0));
        assert_eq!(r.get(2), Complex64::new(0.0, 1.0));
        assert_eq!(r.get(4), Complex64::new(-1.0, 0.0));
        assert_eq!(r.get(6), Complex64::new(0.0, -1.0));
        assert_eq!(r.get(10), r.get(2));
        let z = r.get(1);
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trig_phase_handles_negative_frequencies() {
        assert_eq!(trig_phase(&[-1], &[1], 4), 3);
        assert_eq!(trig_phase(&[1, 1], &[1, 3], 4), 0);
        assert_eq!(trig_phase(&[i64::MIN + 1], &[3], 7), ((i64::MIN as i128 + 1).rem_euclid(7) * 3 % 7) as u64);
    }

    #[test]
    fn walsh_examples() {
        // x = 3/4 = 0.11, h = 1 reads x_1
        assert_eq!(walsh_exponent(1, 3, 2, 2) % 2, 1);
        // x = 1/2 = 0.10, h = 3 reads x_1 + x_2
        assert_eq!(walsh_exponent(3, 2, 2, 2) % 2, 1);
        assert_eq!(walsh_exponent(0, 3, 2, 2), 0);
        // digits of h beyond the precision of x meet zero digits
        assert_eq!(walsh_exponent(4, 3, 2, 2), 0);
    }

    #[test]
    fn real_point_walsh_matches_exact() {
        for h in 0..64u64 {
            for num in 0..64u64 {
                let exact = root(walsh_exponent(h, num, 6, 2) % 2, 2);
                let real = basis_value_real(&[h as i64], &[num as f64 / 64.0], Basis::Walsh(2), 30);
                assert_eq!(exact, real);
            }
        }
    }

    #[test]
    fn walsh_orthonormality_on_full_grid() {
        let b = 2u32;
        for m in 1..=6u32 {
            let n = 1u64 << m;
            let grid = PointSet::grid_1d(n);
            let ev = BasisEvaluator::new(&grid, Basis::Walsh(b)).unwrap();
            for h in 0..n as i64 {
                for k in 0..n as i64 {
                    let mut s = Complex64::new(0.0, 0.0);
                    for p in 0..n as usize {
                        s += ev.value(&[h], p) * ev.value(&[k], p).conj();
                    }
                    let expected = if h == k { n as f64 } else { 0.0 };
                    assert_eq!(s, Complex64::new(expected, 0.0));
                }
            }
        }
    }

    #[test]
    fn exact_log_examples() {
        assert_eq!(exact_log(1, 2), Some(0));
        assert_eq!(exact_log(4096, 2), Some(12));
        assert_eq!(exact_log(27, 3), Some(3));
        assert_eq!(exact_log(12, 2), None);
    }

    #[test]
    fn walsh_evaluator_rejects_wrong_denominator() {
        let pts = PointSet::grid_1d(5);
        assert!(BasisEvaluator::new(&pts, Basis::Walsh(2)).is_err());
    }
}
