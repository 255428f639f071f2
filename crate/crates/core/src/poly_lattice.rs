//! Polynomial lattice rules over `F_b`, the Walsh quality criterion and its
//! component-by-component construction.
//!
//! Point `h` (for `h = 0..b^m`, identified with its digit polynomial) has
//! coordinates `nu_m(h(x) q_j(x) / p(x))`. Because the first `m` Laurent
//! digits of `r/p` determine a residue `r` of degree `< m` uniquely, a
//! coordinate depends only on `r = h q_j mod p`, and `h -> h q_j mod p` is
//! `F_b`-linear. Both facts turn a CBC stage into table lookups.
//!
//! The Walsh kernel
//!
//! ```text
//! phi_alpha(x) = sum_{h >= 1} wal_h(x) / b^(2 alpha mu1(h))
//! ```
//!
//! sums level by level: the `(b-1) b^(l-1)` frequencies with `mu1 = l`
//! contribute `(b-1) b^(l-1)` while `l` is below the position `c0` of the
//! first nonzero digit of `x`, `-b^(c0-1)` at `l = c0`, and nothing beyond.
//! This gives
//!
//! ```text
//! phi_alpha(0) = (b-1)/(b^(2 alpha) - b)
//! phi_alpha(x) = (b-1)/(b^(2 alpha) - b) - b^((1 - 2 alpha) c0) (b^(2 alpha) - 1)/(b^(2 alpha) - b)
//! ```

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field_poly::{is_irreducible, nu_m, smallest_irreducible, tr_m, FieldPoly};
use crate::index_set::{check_base, Basis, IndexSet};
use crate::lattice::{argmin_with_ties, criterion_from_squared, neumaier_sum, CriterionKind, CriterionValue};
use crate::points::{walsh_exponent, PointSet, UnitRoots};
use crate::weights::{mu1, ProductWeights};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyLattice {
    b: u32,
    m: u32,
    p: FieldPoly,
    q: Vec<FieldPoly>,
}

impl PolyLattice {
    pub fn new(p: FieldPoly, q: Vec<FieldPoly>) -> Result<Self> {
        let b = p.base();
        let m = p
            .degree()
            .filter(|&m| m >= 1)
            .ok_or_else(|| Error::InvalidParameter("modulus must have degree >= 1".into()))?;
        if q.is_empty() {
            return Err(Error::InvalidParameter("generating vector is empty".into()));
        }
        for qj in &q {
            if qj.base() != b {
                return Err(Error::BaseMismatch(b, qj.base()));
            }
            if qj.degree().is_some_and(|d| d >= m) {
                return Err(Error::InvalidParameter(format!("generator {qj} has degree >= {m}")));
            }
        }
        if m > 40 {
            return Err(Error::InvalidParameter("degree too large for this implementation".into()));
        }
        Ok(PolyLattice { b, m: m as u32, p, q })
    }

    pub fn base(&self) -> u32 {
        self.b
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> &FieldPoly {
        &self.p
    }

    pub fn generators(&self) -> &[FieldPoly] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// `b^m`.
    pub fn size(&self) -> u64 {
        (self.b as u64).pow(self.m)
    }
}

/// Digit-wise sum modulo `b` of two integers below `b^m`.
fn digit_add(x: u64, y: u64, b: u32) -> u64 {
    if b == 2 {
        return x ^ y;
    }
    crate::weights::digit_add(x, y, b)
}

/// Images of every `h < b^m` under the linear map `h -> (h q mod p)` as
/// integer ids, built from the images of the monomials.
fn residue_table(q: &FieldPoly, p: &FieldPoly, m: u32) -> Result<Vec<u64>> {
    let b = p.base();
    let size = (b as u64).pow(m) as usize;
    let mut basis = Vec::with_capacity(m as usize);
    for k in 0..m as usize {
        basis.push(FieldPoly::monomial(b, k).mul(q)?.rem(p)?.to_int());
    }
    let mut table = vec![0u64; size];
    let bb = b as usize;
    for h in 1..size {
        // lowest nonzero digit position k: table[h] = table[h - b^k] + basis[k]
        let mut k = 0;
        let mut place = 1usize;
        while (h / place) % bb == 0 {
            place *= bb;
            k += 1;
        }
        table[h] = digit_add(table[h - place], basis[k], b);
    }
    Ok(table)
}

/// `nu_m(r/p)` numerators for every residue id `r < b^m`. Linear in `r`.
fn laurent_table(p: &FieldPoly, m: u32) -> Result<Vec<u64>> {
    let b = p.base();
    let size = (b as u64).pow(m) as usize;
    let mut basis = Vec::with_capacity(m as usize);
    for k in 0..m as usize {
        basis.push(nu_m(&FieldPoly::monomial(b, k), p, m)?);
    }
    let mut table = vec![0u64; size];
    let bb = b as usize;
    for r in 1..size {
        let mut k = 0;
        let mut place = 1usize;
        while (r / place) % bb == 0 {
            place *= bb;
            k += 1;
        }
        table[r] = digit_add(table[r - place], basis[k], b);
    }
    Ok(table)
}

/// The `b^m` points, coordinates with denominator `b^m`.
pub fn generate_poly_points(lattice: &PolyLattice) -> Result<PointSet> {
    let size = lattice.size() as usize;
    let d = lattice.dim();
    let laurent = laurent_table(&lattice.p, lattice.m)?;
    let mut nums = vec![0u64; size * d];
    for (j, qj) in lattice.q.iter().enumerate() {
        let residues = residue_table(qj, &lattice.p, lattice.m)?;
        for h in 0..size {
            nums[h * d + j] = laurent[residues[h] as usize];
        }
    }
    PointSet::new(d, lattice.size(), nums)
}

/// The same points computed one by one with polynomial arithmetic.
pub fn generate_poly_points_direct(lattice: &PolyLattice) -> Result<PointSet> {
    let size = lattice.size();
    let mut nums = Vec::with_capacity(size as usize * lattice.dim());
    for h in 0..size {
        let hp = FieldPoly::from_int(h, lattice.b);
        for qj in &lattice.q {
            nums.push(nu_m(&hp.mul(qj)?, &lattice.p, lattice.m)?);
        }
    }
    PointSet::new(lattice.dim(), size, nums)
}

/// `wal_h(num / b^m)`.
pub fn wal(h: u64, num: u64, m: u32, b: u32) -> Result<Complex64> {
    check_base(b)?;
    if num >= (b as u64).pow(m) {
        return Err(Error::InvalidParameter("point outside [0,1)".into()));
    }
    let e = walsh_exponent(h, num, m, b) % b as u64;
    Ok(UnitRoots::new(b as u64).get(e))
}

/// Position of the first nonzero digit of `num / b^m`, `None` at zero.
pub fn first_digit_position(num: u64, m: u32, b: u32) -> Option<u32> {
    (num != 0).then(|| m + 1 - mu1(num, b))
}

/// `phi_alpha(num / b^m)` in closed form.
pub fn phi_alpha(num: u64, m: u32, alpha: f64, b: u32) -> f64 {
    let bf = b as f64;
    let b2a = bf.powf(2.0 * alpha);
    let base = (bf - 1.0) / (b2a - bf);
    match first_digit_position(num, m, b) {
        None => base,
        Some(c0) => base - bf.powf((1.0 - 2.0 * alpha) * c0 as f64) * (b2a - 1.0) / (b2a - bf),
    }
}

fn phi_table(m: u32, alpha: f64, b: u32) -> Vec<f64> {
    let size = (b as u64).pow(m);
    (0..size).map(|x| phi_alpha(x, m, alpha, b)).collect()
}

/// `R~^2 = -1 + (1/b^m) sum_x prod_j (1 + gamma_j^2 phi_alpha(x_j))`.
pub fn rbreve_criterion(lattice: &PolyLattice, w: &ProductWeights) -> Result<CriterionValue> {
    let points = generate_poly_points(lattice)?;
    let phi = phi_table(lattice.m, w.alpha(), lattice.b);
    let gammas = w.gammas(lattice.dim());
    let terms = (0..points.len()).map(|n| {
        let prod: f64 = points
            .numerators(n)
            .iter()
            .zip(&gammas)
            .map(|(&x, g)| 1.0 + g * g * phi[x as usize])
            .product();
        prod - 1.0
    });
    let mean = neumaier_sum(terms) / points.len() as f64;
    criterion_from_squared(CriterionKind::RBreve, mean)
}

/// `sum_j tr_m(h_j) q_j == 0 (mod p)`.
pub fn is_dual_poly(h: &[u64], lattice: &PolyLattice) -> Result<bool> {
    if h.len() != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: lattice.dim(), got: h.len() });
    }
    let mut acc = FieldPoly::zero(lattice.b);
    for (&hj, qj) in h.iter().zip(&lattice.q) {
        acc = acc.add(&tr_m(hj, lattice.m, lattice.b).mul(qj)?)?;
    }
    Ok(acc.rem(&lattice.p)?.is_zero())
}

/// Average of `wal_h` over the points: 1 on the dual lattice, 0 elsewhere.
pub fn walsh_char_sum(h: &[u64], lattice: &PolyLattice) -> Result<Complex64> {
    Ok(if is_dual_poly(h, lattice)? { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// The same average by summing over all `b^m` points.
pub fn walsh_char_sum_literal(h: &[u64], lattice: &PolyLattice) -> Result<Complex64> {
    if h.len() != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: lattice.dim(), got: h.len() });
    }
    let points = generate_poly_points(lattice)?;
    let roots = UnitRoots::new(lattice.b as u64);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..points.len() {
        let e: u64 = h
            .iter()
            .zip(points.numerators(n))
            .map(|(&hj, &x)| walsh_exponent(hj, x, lattice.m, lattice.b))
            .sum();
        sum += roots.get(e);
    }
    Ok(sum / points.len() as f64)
}

/// Criterion squared for every candidate `q = 1..b^m-1` (entry `i` is
/// candidate id `i + 1`) given the products over the fixed components.
pub fn poly_stage_scan(
    p: &FieldPoly,
    m: u32,
    partial: &[f64],
    gamma: f64,
    phi_by_residue: &[f64],
) -> Result<Vec<f64>> {
    let b = p.base();
    let size = (b as u64).pow(m);
    let g2 = gamma * gamma;
    (1..size)
        .into_par_iter()
        .map(|id| {
            let residues = residue_table(&FieldPoly::from_int(id, b), p, m)?;
            let terms = residues
                .iter()
                .zip(partial)
                .map(|(&r, &prod)| prod * (1.0 + g2 * phi_by_residue[r as usize]) - 1.0);
            Ok(neumaier_sum(terms) / size as f64)
        })
        .collect()
}

/// CBC search over polynomial generators; `q_1 = 1` and later components
/// range over the nonzero polynomials of degree `< m`.
pub fn cbc_poly(
    m: u32,
    d: usize,
    w: &ProductWeights,
    b: u32,
    modulus: Option<FieldPoly>,
) -> Result<PolyLattice> {
    check_base(b)?;
    if d == 0 || m == 0 {
        return Err(Error::InvalidParameter("CBC needs d >= 1 and m >= 1".into()));
    }
    if m > 24 {
        return Err(Error::InvalidParameter(format!("m = {m} is beyond desk scale")));
    }
    let p = match modulus {
        Some(p) => {
            if p.base() != b {
                return Err(Error::BaseMismatch(b, p.base()));
            }
            if p.degree() != Some(m as usize) || !is_irreducible(&p)? {
                return Err(Error::InvalidParameter(format!("modulus {p} is not irreducible of degree {m}")));
            }
            p
        }
        None => smallest_irreducible(m as usize, b)?,
    };
    let gammas = w.gammas(d);
    let laurent = laurent_table(&p, m)?;
    let phi = phi_table(m, w.alpha(), b);
    let phi_by_residue: Vec<f64> = laurent.iter().map(|&x| phi[x as usize]).collect();

    let one = FieldPoly::one(b);
    let first = residue_table(&one, &p, m)?;
    let g2 = gammas[0] * gammas[0];
    let mut partial: Vec<f64> = first.iter().map(|&r| 1.0 + g2 * phi_by_residue[r as usize]).collect();
    let mut q = vec![one];
    for s in 1..d {
        let values = poly_stage_scan(&p, m, &partial, gammas[s], &phi_by_residue)?;
        let best = argmin_with_ties(&values).expect("b^m - 1 >= 1 candidates");
        let chosen = FieldPoly::from_int(best as u64 + 1, b);
        let residues = residue_table(&chosen, &p, m)?;
        let g2 = gammas[s] * gammas[s];
        for (prod, &r) in partial.iter_mut().zip(&residues) {
            *prod *= 1.0 + g2 * phi_by_residue[r as usize];
        }
        q.push(chosen);
    }
    PolyLattice::new(p, q)
}

/// Whether `h -> sum_j tr_m(h_j) q_j mod p` is injective on a Walsh index set,
/// which makes the Walsh Gram matrix on the points the identity.
pub fn verify_poly_reconstruction(lattice: &PolyLattice, set: &IndexSet) -> Result<bool> {
    if set.basis() != Basis::Walsh(lattice.b) {
        return Err(Error::InvalidParameter("index set must use the lattice's Walsh base".into()));
    }
    if set.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: lattice.dim(), got: set.dim() });
    }
    if set.len() as u64 > lattice.size() {
        return Err(Error::ReconstructionImpossible { size: set.len(), n: lattice.size() as usize });
    }
    let tables = lattice
        .q
        .iter()
        .map(|qj| residue_table(qj, &lattice.p, lattice.m))
        .collect::<Result<Vec<_>>>()?;
    let mask = lattice.size();
    let mut seen = vec![false; lattice.size() as usize];
    for h in set.members() {
        let mut r = 0u64;
        for (table, &hj) in tables.iter().zip(h) {
            r = digit_add(r, table[(hj as u64 % mask) as usize], lattice.b);
        }
        if seen[r as usize] {
            return Ok(false);
        }
        seen[r as usize] = true;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::GammaRule;

    fn unit(alpha: f64) -> ProductWeights {
        ProductWeights::new(alpha, GammaRule::Constant(1.0)).unwrap()
    }

    fn poly(b: u32, c: &[u32]) -> FieldPoly {
        FieldPoly::new(b, c.to_vec()).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_alpha(0, 8, 1.0, 2), 0.5);
        assert_eq!(phi_alpha(128, 8, 1.0, 2), -0.25);
        assert_eq!(phi_alpha(64, 8, 1.0, 2), 0.125);
    }

    #[test]
    fn phi_matches_series() {
        let m = 8;
        for alpha in [1.0, 2.0] {
            for x in 0..256u64 {
                let mut series = 0.0;
                for h in 1..(1u64 << 16) {
                    let e = walsh_exponent(h, x, m, 2) % 2;
                    let s = if e == 0 { 1.0 } else { -1.0 };
                    series += s / 2f64.powf(2.0 * alpha * mu1(h, 2) as f64);
                }
                // levels past 16 cancel for x != 0; at x = 0 every term is
                // positive and the remainder is geometric
                if x == 0 {
                    series += (17..200).map(|l| 2f64.powi(l - 1) / 2f64.powf(2.0 * alpha * l as f64)).sum::<f64>();
                }
                assert!((phi_alpha(x, m, alpha, 2) - series).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn two_point_rbreve() {
        let l = PolyLattice::new(poly(2, &[0, 1]), vec![FieldPoly::one(2)]).unwrap();
        let pts = generate_poly_points(&l).unwrap();
        assert_eq!(pts.numerators(1), &[1]);
        let r = rbreve_criterion(&l, &unit(1.0)).unwrap();
        assert!((r.squared - 0.125).abs() < 1e-15);
    }

    #[test]
    fn fast_points_match_direct() {
        for b in [2u32, 3] {
            let m = if b == 2 { 6 } else { 4 };
            let p = smallest_irreducible(m as usize, b).unwrap();
            let q = vec![FieldPoly::one(b), FieldPoly::from_int(7, b), FieldPoly::from_int(11, b)];
            let l = PolyLattice::new(p, q).unwrap();
            assert_eq!(generate_poly_points(&l).unwrap(), generate_poly_points_direct(&l).unwrap());
        }
    }

    #[test]
    fn small_point_example() {
        let l = PolyLattice::new(poly(2, &[1, 1, 1]), vec![FieldPoly::one(2)]).unwrap();
        let pts = generate_poly_points(&l).unwrap();
        // 1/p = x^-2 + x^-3 + ..., x/p = x^-1 + x^-2 + ..., (x+1)/p = x^-1 + x^-3 + ...
        let nums: Vec<u64> = (0..4).map(|n| pts.numerators(n)[0]).collect();
        assert_eq!(nums, vec![0, 1, 3, 2]);
    }

    #[test]
    fn dual_examples() {
        let l = PolyLattice::new(poly(2, &[1, 1, 1]), vec![FieldPoly::one(2)]).unwrap();
        assert!(is_dual_poly(&[0], &l).unwrap());
        assert!(is_dual_poly(&[4], &l).unwrap());
        assert!(!is_dual_poly(&[3], &l).unwrap());
        for h in [0u64, 4, 3] {
            let lit = walsh_char_sum_literal(&[h], &l).unwrap();
            assert!((lit - walsh_char_sum(&[h], &l).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn cbc_poly_basics() {
        let l = cbc_poly(3, 1, &unit(1.0), 2, None).unwrap();
        assert_eq!(l.generators(), &[FieldPoly::one(2)]);
        assert_eq!(l.modulus(), &poly(2, &[1, 1, 0, 1]));
        assert!(cbc_poly(3, 2, &unit(1.0), 2, Some(poly(2, &[1, 0, 0, 1]))).is_err());
        let l = cbc_poly(5, 3, &unit(1.0), 2, None).unwrap();
        let direct = rbreve_criterion(&l, &unit(1.0)).unwrap();
        assert!(direct.value.is_finite());
    }

    #[test]
    fn wal_examples() {
        assert_eq!(wal(0, 3, 2, 2).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(wal(1, 3, 2, 2).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(wal(3, 2, 2, 2).unwrap(), Complex64::new(-1.0, 0.0));
        assert!(wal(1, 4, 2, 2).is_err());
    }
}
