//! Experiment harness for QMC hyperinterpolation.
//!
//! Each subcommand resolves a complete configuration (defaults, optional
//! config document, flags), runs a computation from the core crate and emits
//! a text artifact whose header stamps the configuration and its SHA-256.

pub mod app;
pub mod config;
pub mod construct;
pub mod convergence;
pub mod denoise;
pub mod error;
pub mod points;
pub mod timing;

use qmc_hyperinterp::field_poly::FieldPoly;

pub use config::Config;
pub use error::CliError;

/// `default` for the smallest irreducible, else an integer id or a
/// comma-separated coefficient list (lowest degree first).
pub fn parse_modulus(text: &str, b: u32) -> Result<Option<FieldPoly>, CliError> {
    if text == "default" {
        return Ok(None);
    }
    if text.contains(',') {
        return Ok(Some(FieldPoly::parse(text, b)?));
    }
    let id: u64 = text
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse modulus `{text}`")))?;
    Ok(Some(FieldPoly::from_int(id, b)))
}
