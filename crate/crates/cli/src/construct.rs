//! `construct`: CBC searches with a file-backed vector cache.

use std::fmt;
use std::path::Path;

use qmc_hyperinterp::cache::{poly_record, vector_record, PolyKey, VectorCache, VectorKey};
use qmc_hyperinterp::field_poly::smallest_irreducible;
use qmc_hyperinterp::index_set::{enumerate_cross, DEFAULT_CAP};
use qmc_hyperinterp::lattice::{cbc_rank1, cbc_reconstruction, r_criterion, s_criterion, CriterionKind, CriterionValue};
use qmc_hyperinterp::poly_lattice::{cbc_poly, rbreve_criterion};
use qmc_hyperinterp::Basis;

use crate::config::Config;
use crate::error::CliError;
use crate::parse_modulus;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("kind", "R"),
    ("n", "127"),
    ("d", "4"),
    ("alpha", "2"),
    ("gamma", "pow:1:2"),
    ("m", "10"),
    ("b", "2"),
    ("modulus", "default"),
    ("threshold", "64"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Cached,
    Computed,
}

impl fmt::Display for CacheStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheStatus::Cached => "cached",
            CacheStatus::Computed => "computed",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconOutcome {
    pub card: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructReport {
    /// Cache-format record; `None` when a reconstruction search failed.
    pub record: Option<String>,
    pub criterion: Option<CriterionValue>,
    pub recon: Option<ReconOutcome>,
    pub status: CacheStatus,
}

impl ConstructReport {
    /// Human-readable summary printed on stdout.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        if let Some(r) = &self.record {
            out.push_str(&format!("record {r}\n"));
        }
        if let Some(c) = &self.criterion {
            out.push_str(&format!("criterion {} = {}\n", c.kind, c.value));
        }
        if let Some(r) = &self.recon {
            out.push_str(&format!("card_I {}\n", r.card));
            out.push_str(&format!("reconstruction {}\n", if r.success { "success" } else { "failure" }));
        }
        out.push_str(&format!("status {}\n", self.status));
        out
    }

    /// Vector file: configuration header followed by the record.
    pub fn file_text(&self, cfg: &Config) -> String {
        let mut out = cfg.header();
        if let Some(r) = &self.record {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

pub fn run(cfg: &Config, cache: Option<&Path>) -> Result<ConstructReport, CliError> {
    let cache = cache.map(VectorCache::new);
    match cfg.get("kind")? {
        "R" => rank1(cfg, cache.as_ref(), CriterionKind::R),
        "S" => rank1(cfg, cache.as_ref(), CriterionKind::S),
        "recon" => recon(cfg, cache.as_ref()),
        "poly" => poly(cfg, cache.as_ref()),
        other => Err(CliError::Config(format!("unknown kind `{other}`; expected R, S, recon or poly"))),
    }
}

fn rank1(cfg: &Config, cache: Option<&VectorCache>, kind: CriterionKind) -> Result<ConstructReport, CliError> {
    let n = cfg.u64("n")?;
    let d = cfg.usize("d")?;
    let w = cfg.weights()?;
    let key = VectorKey { kind: kind.to_string(), n, d, weights: w.clone() };
    let (lattice, status) = match cache.map(|c| c.lookup(&key)).transpose()?.flatten() {
        Some(l) => (l, CacheStatus::Cached),
        None => {
            let (l, _) = cbc_rank1(n, d, &w, kind)?;
            if let Some(c) = cache {
                c.store(&key, &l)?;
            }
            (l, CacheStatus::Computed)
        }
    };
    let criterion = match kind {
        CriterionKind::S => s_criterion(&lattice, &w)?,
        _ => r_criterion(&lattice, &w)?,
    };
    Ok(ConstructReport {
        record: Some(vector_record(&key, &lattice)),
        criterion: Some(criterion),
        recon: None,
        status,
    })
}

fn recon(cfg: &Config, cache: Option<&VectorCache>) -> Result<ConstructReport, CliError> {
    let n = cfg.u64("n")?;
    let d = cfg.usize("d")?;
    let w = cfg.weights()?;
    let threshold = cfg.f64("threshold")?;
    let set = enumerate_cross(d, threshold, &w, Basis::Trig, DEFAULT_CAP)?;
    let card = set.len();
    if card as u64 > n {
        return Err(CliError::Impossible(format!("|I| = {card} exceeds N = {n}")));
    }
    // the index set depends on the threshold, so it is part of the key
    let key = VectorKey { kind: format!("recon:{threshold}"), n, d, weights: w };
    if let Some(l) = cache.map(|c| c.lookup(&key)).transpose()?.flatten() {
        return Ok(ConstructReport {
            record: Some(vector_record(&key, &l)),
            criterion: None,
            recon: Some(ReconOutcome { card, success: true }),
            status: CacheStatus::Cached,
        });
    }
    let found = cbc_reconstruction(n, &set)?;
    if let (Some(c), Some(l)) = (cache, &found) {
        c.store(&key, l)?;
    }
    Ok(ConstructReport {
        record: found.as_ref().map(|l| vector_record(&key, l)),
        criterion: None,
        recon: Some(ReconOutcome { card, success: found.is_some() }),
        status: CacheStatus::Computed,
    })
}

fn poly(cfg: &Config, cache: Option<&VectorCache>) -> Result<ConstructReport, CliError> {
    let b = cfg.u32("b")?;
    let m = cfg.u32("m")?;
    let d = cfg.usize("d")?;
    let w = cfg.weights()?;
    let modulus = match parse_modulus(cfg.get("modulus")?, b)? {
        Some(p) => p,
        None => smallest_irreducible(m as usize, b)?,
    };
    let key = PolyKey { b, m, modulus: modulus.clone(), d, weights: w.clone() };
    let (lattice, status) = match cache.map(|c| c.lookup_poly(&key)).transpose()?.flatten() {
        Some(l) => (l, CacheStatus::Cached),
        None => {
            let l = cbc_poly(m, d, &w, b, Some(modulus))?;
            if let Some(c) = cache {
                c.store_poly(&key, &l)?;
            }
            (l, CacheStatus::Computed)
        }
    };
    let criterion = rbreve_criterion(&lattice, &w)?;
    Ok(ConstructReport {
        record: Some(poly_record(&key, &lattice)),
        criterion: Some(criterion),
        recon: None,
        status,
    })
}
