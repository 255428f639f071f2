//! Quasi-Monte Carlo hyperinterpolation on the unit cube.
//!
//! The crate builds rank-1 lattice rules and polynomial lattice rules by
//! component-by-component search, uses them to approximate Fourier and
//! Walsh coefficients of a function from its samples, and provides a
//! soft-thresholding (Lasso) variant for noisy data.

pub mod cache;
pub mod error;
pub mod field_poly;
pub mod gram;
pub mod hyperinterp;
pub mod index_set;
pub mod lasso;
pub mod lattice;
pub mod points;
pub mod poly_lattice;
pub mod testbed;
pub mod weights;
pub mod zeta;

pub use error::{Error, Result};
pub use index_set::{Basis, IndexSet};
pub use weights::{GammaRule, ProductWeights};
