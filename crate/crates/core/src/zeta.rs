//! Riemann zeta function for real `s > 1`.
//!
//! A plain truncated sum converges far too slowly near `s = 1`, so the value
//! is computed with Euler-Maclaurin summation: a short direct sum up to
//! `T - 1`, the integral tail `T^(1-s)/(s-1)`, the half endpoint term and
//! eight Bernoulli corrections. With `T = 32` the remainder is far below
//! `1e-15` relative for every `s > 1`.

use crate::error::{Error, Result};

const CUTOFF: f64 = 32.0;

/// `B_{2k} / (2k)!` for `k = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::InvalidParameter(format!("zeta needs s > 1, got {s}")));
    }
    if s > 60.0 {
        // 2^-60 is below double precision relative to 1
        return Ok(1.0 + 2f64.powf(-s) + 3f64.powf(-s));
    }
    let t = CUTOFF;
    let mut head = 0.0;
    // smallest terms first
    for n in (1..CUTOFF as u32).rev() {
        head += (n as f64).powf(-s);
    }
    let mut tail = t.powf(1.0 - s) / (s - 1.0) + 0.5 * t.powf(-s);
    // rising factorial s (s+1) ... (s+2k-2) times T^(-s-2k+1)
    let mut rising = s;
    let mut power = t.powf(-s - 1.0);
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            let a = s + (2 * k - 1) as f64;
            let b = s + (2 * k) as f64;
            rising *= a * b;
            power /= t * t;
        }
        tail += coeff * rising * power;
    }
    Ok(head + tail)
}
