//! `points`: point sets of rank-1 and polynomial lattices as CSV.

use qmc_hyperinterp::field_poly::{fibonacci_poly, smallest_irreducible, FieldPoly};
use qmc_hyperinterp::lattice::{generate_points, Rank1Lattice};
use qmc_hyperinterp::points::PointSet;
use qmc_hyperinterp::poly_lattice::{generate_poly_points, PolyLattice};

use crate::config::Config;
use crate::error::CliError;
use crate::parse_modulus;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("lattice", "fibonacci"),
    ("n", "89"),
    ("z", "1,55"),
    ("fib_index", "11"),
    ("b", "2"),
    ("m", "7"),
    ("modulus", "default"),
    ("q", "1,1"),
    ("fib_poly_index", "8"),
    ("format", "decimal"),
];

/// Numeric Fibonacci numbers with `F_1 = F_2 = 1`.
pub fn fibonacci(k: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..k {
        let next = a.checked_add(b).expect("Fibonacci index within u64 range");
        a = b;
        b = next;
    }
    a
}

/// The rank-1 lattice with `N = F_k` and `z = (1, F_{k-1})`.
pub fn fibonacci_lattice(k: usize) -> Result<Rank1Lattice, CliError> {
    if k < 3 {
        return Err(CliError::Config("fib_index must be at least 3".into()));
    }
    Ok(Rank1Lattice::new(fibonacci(k), vec![1, fibonacci(k - 1)])?)
}

/// The polynomial lattice with modulus `F_n(x)` and `q = (1, F_{n-1}(x))`.
pub fn fibonacci_poly_lattice(n: usize, b: u32) -> Result<PolyLattice, CliError> {
    if n < 3 {
        return Err(CliError::Config("fib_poly_index must be at least 3".into()));
    }
    Ok(PolyLattice::new(fibonacci_poly(n, b)?, vec![FieldPoly::one(b), fibonacci_poly(n - 1, b)?])?)
}

pub fn point_set(cfg: &Config) -> Result<PointSet, CliError> {
    match cfg.get("lattice")? {
        "rank1" => {
            let lattice = Rank1Lattice::new(cfg.u64("n")?, cfg.list_u64("z")?)?;
            Ok(generate_points(&lattice))
        }
        "fibonacci" => Ok(generate_points(&fibonacci_lattice(cfg.usize("fib_index")?)?)),
        "poly" => {
            let b = cfg.u32("b")?;
            let m = cfg.u32("m")?;
            let p = match parse_modulus(cfg.get("modulus")?, b)? {
                Some(p) => p,
                None => smallest_irreducible(m as usize, b)?,
            };
            let q = cfg.list_u64("q")?.into_iter().map(|id| FieldPoly::from_int(id, b)).collect();
            Ok(generate_poly_points(&PolyLattice::new(p, q)?)?)
        }
        "fibonacci-poly" => {
            let lattice = fibonacci_poly_lattice(cfg.usize("fib_poly_index")?, cfg.u32("b")?)?;
            Ok(generate_poly_points(&lattice)?)
        }
        other => Err(CliError::Config(format!(
            "unknown lattice `{other}`; expected rank1, fibonacci, poly or fibonacci-poly"
        ))),
    }
}

pub fn run(cfg: &Config) -> Result<String, CliError> {
    let points = point_set(cfg)?;
    let fraction = match cfg.get("format")? {
        "decimal" => false,
        "fraction" => true,
        other => return Err(CliError::Config(format!("unknown format `{other}`"))),
    };
    let mut out = cfg.header();
    let names: Vec<String> = (1..=points.dim()).map(|j| format!("x{j}")).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    let den = points.den();
    for k in 0..points.len() {
        let row: Vec<String> = points
            .numerators(k)
            .iter()
            .map(|&num| if fraction { format!("{num}/{den}") } else { format!("{}", num as f64 / den as f64) })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_numbers() {
        assert_eq!(fibonacci(1), 1);
        assert_eq!(fibonacci(2), 1);
        assert_eq!(fibonacci(10), 55);
        assert_eq!(fibonacci(11), 89);
    }

    #[test]
    fn fibonacci_poly_sizes() {
        assert_eq!(fibonacci_poly_lattice(8, 2).unwrap().size(), 128);
        assert_eq!(fibonacci_poly_lattice(7, 2).unwrap().size(), 64);
    }
}
