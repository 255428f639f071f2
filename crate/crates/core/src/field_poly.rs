//! Polynomials over the prime field `F_b`.
//!
//! Coefficients are stored lowest degree first with no trailing zeros, so
//! the zero polynomial is the empty vector. A polynomial is identified with
//! the integer whose base-`b` digits are its coefficients
//! (`c_0 + c_1 b + c_2 b^2 + ...`); this identification orders candidates in
//! searches and maps lattice point indices and Walsh frequencies to
//! polynomials.

use std::fmt;

use crate::error::{Error, Result};
use crate::index_set::check_base;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldPoly {
    b: u32,
    coeffs: Vec<u32>,
}

impl FieldPoly {
    pub fn new(b: u32, coeffs: Vec<u32>) -> Result<Self> {
        check_base(b)?;
        if coeffs.iter().any(|&c| c >= b) {
            return Err(Error::InvalidParameter(format!("coefficient outside F_{b}: {coeffs:?}")));
        }
        Ok(Self::normalized(b, coeffs))
    }

    fn normalized(b: u32, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FieldPoly { b, coeffs }
    }

    pub fn zero(b: u32) -> Self {
        FieldPoly { b, coeffs: Vec::new() }
    }

    pub fn one(b: u32) -> Self {
        FieldPoly { b, coeffs: vec![1] }
    }

    /// `x^k`.
    pub fn monomial(b: u32, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1;
        FieldPoly { b, coeffs }
    }

    /// Polynomial whose coefficients are the base-`b` digits of `n`.
    pub fn from_int(n: u64, b: u32) -> Self {
        let mut coeffs = Vec::new();
        let mut rest = n;
        while rest > 0 {
            coeffs.push((rest % b as u64) as u32);
            rest /= b as u64;
        }
        FieldPoly { b, coeffs }
    }

    pub fn to_int(&self) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * self.b as u64 + c as u64)
    }

    pub fn base(&self) -> u32 {
        self.b
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn same_base(&self, other: &FieldPoly) -> Result<()> {
        if self.b == other.b {
            Ok(())
        } else {
            Err(Error::BaseMismatch(self.b, other.b))
        }
    }

    pub fn add(&self, other: &FieldPoly) -> Result<FieldPoly> {
        self.same_base(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| (self.coeffs.get(i).unwrap_or(&0) + other.coeffs.get(i).unwrap_or(&0)) % self.b)
            .collect();
        Ok(Self::normalized(self.b, coeffs))
    }

    pub fn sub(&self, other: &FieldPoly) -> Result<FieldPoly> {
        self.same_base(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let b = self.b;
        let coeffs = (0..n)
            .map(|i| (self.coeffs.get(i).unwrap_or(&0) + b - other.coeffs.get(i).unwrap_or(&0)) % b)
            .collect();
        Ok(Self::normalized(b, coeffs))
    }

    pub fn mul(&self, other: &FieldPoly) -> Result<FieldPoly> {
        self.same_base(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(FieldPoly::zero(self.b));
        }
        let b = self.b as u64;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &c) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * c as u64) % b;
            }
        }
        Ok(Self::normalized(self.b, out.into_iter().map(|c| c as u32).collect()))
    }

    /// Quotient and remainder of long division by a nonzero divisor.
    pub fn div_rem(&self, divisor: &FieldPoly) -> Result<(FieldPoly, FieldPoly)> {
        self.same_base(divisor)?;
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::InvalidParameter("division by the zero polynomial".into()))?;
        let b = self.b;
        let inv = inverse(divisor.leading(), b);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((FieldPoly::zero(b), self.clone()));
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for shift in (0..rem.len() - dd).rev() {
            let lead = rem[shift + dd];
            if lead == 0 {
                continue;
            }
            let factor = lead * inv % b;
            quot[shift] = factor;
            for (i, &c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + b * b - factor * c % b) % b;
            }
        }
        Ok((Self::normalized(b, quot), Self::normalized(b, rem)))
    }

    pub fn rem(&self, divisor: &FieldPoly) -> Result<FieldPoly> {
        Ok(self.div_rem(divisor)?.1)
    }

    pub fn scale(&self, factor: u32) -> FieldPoly {
        let b = self.b;
        Self::normalized(b, self.coeffs.iter().map(|&c| c * (factor % b) % b).collect())
    }
}

impl fmt::Display for FieldPoly {
    /// Comma-separated coefficients, lowest degree first; `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FieldPoly {
    /// Parses the comma-separated form written by `Display`.
    pub fn parse(text: &str, b: u32) -> Result<FieldPoly> {
        let coeffs = text
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad coefficient `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        FieldPoly::new(b, coeffs)
    }
}

/// Multiplicative inverse in `F_b`.
pub fn inverse(a: u32, b: u32) -> u32 {
    debug_assert!(a % b != 0);
    // a^(b-2) by Fermat
    let mut result = 1u64;
    let mut base = (a % b) as u64;
    let mut e = b - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % b as u64;
        }
        base = base * base % b as u64;
        e >>= 1;
    }
    result as u32
}

/// `(a c) mod p`.
pub fn poly_mul_mod(a: &FieldPoly, c: &FieldPoly, p: &FieldPoly) -> Result<FieldPoly> {
    a.mul(c)?.rem(p)
}

/// Trial division by every monic polynomial of degree `1..=deg(p)/2`.
pub fn is_irreducible(p: &FieldPoly) -> Result<bool> {
    let m = p
        .degree()
        .filter(|&m| m >= 1)
        .ok_or_else(|| Error::InvalidParameter("irreducibility needs degree >= 1".into()))?;
    let b = p.b as u64;
    for k in 1..=m / 2 {
        // monic degree k: ids b^k .. 2 b^k
        let lo = b.pow(k as u32);
        for id in lo..2 * lo {
            if p.rem(&FieldPoly::from_int(id, p.b))?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Monic irreducible polynomial of degree `m` with the smallest integer id.
pub fn smallest_irreducible(m: usize, b: u32) -> Result<FieldPoly> {
    check_base(b)?;
    if m == 0 {
        return Err(Error::InvalidParameter("modulus degree must be >= 1".into()));
    }
    let lo = (b as u64).pow(m as u32);
    for id in lo..2 * lo {
        let p = FieldPoly::from_int(id, b);
        if is_irreducible(&p)? {
            return Ok(p);
        }
    }
    Err(Error::NoIrreducible(m))
}

/// `F_1 = 1`, `F_2 = x`, `F_n = x F_{n-1} + F_{n-2}`.
pub fn fibonacci_poly(n: usize, b: u32) -> Result<FieldPoly> {
    check_base(b)?;
    if n == 0 {
        return Err(Error::InvalidParameter("Fibonacci polynomials start at n = 1".into()));
    }
    let x = FieldPoly::monomial(b, 1);
    let (mut prev, mut cur) = (FieldPoly::one(b), x.clone());
    if n == 1 {
        return Ok(prev);
    }
    for _ in 2..n {
        let next = x.mul(&cur)?.add(&prev)?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// First `m` digits of the Laurent expansion of `num/den` in `x^-1`, returned
/// as the numerator of a rational with denominator `b^m`. Non-negative powers
/// of `x` are discarded.
pub fn nu_m(num: &FieldPoly, den: &FieldPoly, m: u32) -> Result<u64> {
    num.same_base(den)?;
    let dd = den
        .degree()
        .ok_or_else(|| Error::InvalidParameter("zero denominator in Laurent expansion".into()))?;
    let b = num.b;
    let inv = inverse(den.leading(), b);
    let mut rem = num.rem(den)?.coeffs;
    rem.resize(dd + 1, 0);
    let mut out = 0u64;
    for _ in 0..m {
        // rem <- rem * x
        rem.rotate_right(1);
        let digit = rem[dd] * inv % b;
        if digit != 0 {
            for (i, &c) in den.coeffs.iter().enumerate() {
                rem[i] = (rem[i] + b * b - digit * c % b) % b;
            }
        }
        debug_assert_eq!(rem[dd], 0);
        out = out * b as u64 + digit as u64;
    }
    Ok(out)
}

/// Polynomial of the lowest `m` base-`b` digits of `h`.
pub fn tr_m(h: u64, m: u32, b: u32) -> FieldPoly {
    FieldPoly::from_int(h % (b as u64).pow(m), b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(b: u32, c: &[u32]) -> FieldPoly {
        FieldPoly::new(b, c.to_vec()).unwrap()
    }

    #[test]
    fn mul_mod_examples() {
        let p = poly(2, &[1, 1, 1]);
        let xp1 = poly(2, &[1, 1]);
        assert_eq!(poly_mul_mod(&xp1, &xp1, &p).unwrap(), poly(2, &[0, 1]));
        assert!(poly_mul_mod(&FieldPoly::zero(2), &xp1, &p).unwrap().is_zero());
        let a = poly(2, &[1, 0, 1, 1]);
        assert_eq!(poly_mul_mod(&a, &FieldPoly::one(2), &p).unwrap(), a.rem(&p).unwrap());
        assert_eq!(poly_mul_mod(&a, &poly(3, &[1]), &p).unwrap_err(), Error::BaseMismatch(2, 3));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&poly(2, &[1, 1, 1])).unwrap());
        assert!(!is_irreducible(&poly(2, &[0, 0, 1])).unwrap());
        assert!(is_irreducible(&poly(2, &[1, 1, 0, 0, 1])).unwrap());
        assert_eq!(smallest_irreducible(2, 2).unwrap(), poly(2, &[1, 1, 1]));
        assert_eq!(smallest_irreducible(3, 2).unwrap(), poly(2, &[1, 1, 0, 1]));
    }

    #[test]
    fn fibonacci_examples() {
        assert_eq!(fibonacci_poly(1, 2).unwrap(), FieldPoly::one(2));
        assert_eq!(fibonacci_poly(2, 2).unwrap(), FieldPoly::monomial(2, 1));
        assert_eq!(fibonacci_poly(3, 2).unwrap(), poly(2, &[1, 0, 1]));
        assert_eq!(fibonacci_poly(7, 2).unwrap().degree(), Some(6));
    }

    #[test]
    fn nu_m_examples() {
        let one = FieldPoly::one(2);
        assert_eq!(nu_m(&FieldPoly::zero(2), &poly(2, &[1, 1, 1]), 4).unwrap(), 0);
        assert_eq!(nu_m(&one, &poly(2, &[0, 1]), 1).unwrap(), 1); // 1/2
        assert_eq!(nu_m(&one, &poly(2, &[1, 1, 1]), 4).unwrap(), 6); // 6/16 = 3/8
        // integer part is dropped: (x^2 + 1)/x = x + 1/x
        assert_eq!(nu_m(&poly(2, &[1, 0, 1]), &poly(2, &[0, 1]), 2).unwrap(), 2);
        assert!(nu_m(&one, &FieldPoly::zero(2), 2).is_err());
    }

    #[test]
    fn nu_m_non_monic_base_three() {
        // 1/(2x) = 2 x^-1 over F_3, since 2 * 2 = 1
        assert_eq!(nu_m(&FieldPoly::one(3), &poly(3, &[0, 2]), 1).unwrap(), 2);
    }

    #[test]
    fn tr_m_examples() {
        assert!(tr_m(0, 3, 2).is_zero());
        assert_eq!(tr_m(6, 3, 2), poly(2, &[0, 1, 1]));
        assert_eq!(tr_m(9, 3, 2), FieldPoly::one(2));
    }

    #[test]
    fn integer_identification_round_trips() {
        for b in [2u32, 3, 5] {
            for n in 0..500u64 {
                assert_eq!(FieldPoly::from_int(n, b).to_int(), n);
            }
        }
        assert_eq!(FieldPoly::parse("1,1,0,1", 2).unwrap().to_string(), "1,1,0,1");
        assert_eq!(FieldPoly::zero(2).to_string(), "0");
        assert!(FieldPoly::parse("0", 2).unwrap().is_zero());
    }
}
