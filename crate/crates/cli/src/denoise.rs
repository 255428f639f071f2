//! `denoise`: plain against Lasso hyperinterpolation of noisy samples.
//!
//! Two presets are provided. `fig4` samples the two-dimensional smooth test
//! function on a rank-1 lattice with `N = 4093`. The index set is the largest
//! hyperbolic cross with `|I| <= N/2` for which the lattice is exact, found
//! by bisection on the threshold; the lattice is either built for the set by
//! the reconstruction CBC (`lattice=recon`) or fixed beforehand by CBC-R
//! (`lattice=R`). `fig5-square` samples the square wave on the
//! grid `k / 2^12` and uses the Walsh indices `0..2^11`.
//!
//! In `fresh` mode the Lasso approximant is computed from a new noisy sample
//! on exactness points for `I`, independent of the noise seen by the plain
//! approximant; in `same` mode both share one sample.

use rayon::prelude::*;

use qmc_hyperinterp::hyperinterp::{l2_error_analytic, qmc_hyperinterp, SampleSet};
use qmc_hyperinterp::index_set::{enumerate_cross, DEFAULT_CAP};
use qmc_hyperinterp::lasso::{add_noise, lasso_qmc_hyperinterp, shrink, NoiseSpec};
use qmc_hyperinterp::lattice::{
    cbc_rank1, cbc_reconstruction, generate_points, verify_reconstruction, CriterionKind, Rank1Lattice,
};
use qmc_hyperinterp::points::{exact_log, PointSet};
use qmc_hyperinterp::testbed::TestFunction;
use qmc_hyperinterp::{Basis, IndexSet, ProductWeights};

use crate::config::{parse_document, Config};
use crate::error::CliError;
use crate::timing::recon_search;

pub const PRESETS: [&str; 2] = ["fig4", "fig5-square"];

/// Defaults for `preset`; every preset shares one key set.
pub fn defaults(preset: &str) -> Result<Vec<(&'static str, &'static str)>, CliError> {
    let common = [("snr_db", "15"), ("trials", "50"), ("seed", "1"), ("mode", "fresh"), ("lambda_grid", "")];
    let specific: [(&str, &str); 10] = match preset {
        "fig4" => [
            ("preset", "fig4"),
            ("lattice", "recon"),
            ("function", "kv"),
            ("d", "2"),
            ("n", "4093"),
            ("alpha", "4"),
            ("gamma", "pow:1:3.5"),
            ("set_alpha", "3.4"),
            ("threshold", "auto"),
            ("lambda", "0.016"),
        ],
        "fig5-square" => [
            ("preset", "fig5-square"),
            ("lattice", "grid"),
            ("function", "square"),
            ("d", "1"),
            ("n", "4096"),
            ("alpha", "none"),
            ("gamma", "none"),
            ("set_alpha", "none"),
            ("threshold", "none"),
            ("lambda", "0.016"),
        ],
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}`; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(specific.into_iter().chain(common).collect())
}

/// Preset named by the flag, else by the config document, else `fig4`.
pub fn peek_preset(flag: Option<&str>, file_text: Option<&str>) -> String {
    if let Some(p) = flag {
        return p.to_string();
    }
    file_text
        .and_then(|t| parse_document(t).get("preset").cloned())
        .unwrap_or_else(|| "fig4".to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fresh,
    Same,
}

/// Everything fixed before the trials run.
pub struct Setup {
    pub function: TestFunction,
    pub set: IndexSet,
    /// Construction points, where the plain approximant is sampled.
    pub points: PointSet,
    /// Exactness points for `I`, where fresh Lasso samples are drawn.
    pub exact_points: PointSet,
    /// Threshold of the hyperbolic cross, when one is used.
    pub threshold: Option<f64>,
    pub fhat: Vec<num_complex::Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub l2_noisy: f64,
    pub l2_lasso: f64,
    pub bound: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseReport {
    pub rows: Vec<TrialRow>,
    pub card: usize,
    pub n: usize,
    pub threshold: Option<f64>,
    pub sigma: f64,
}

impl DenoiseReport {
    pub fn mean_noisy(&self) -> f64 {
        self.rows.iter().map(|r| r.l2_noisy).sum::<f64>() / self.rows.len() as f64
    }

    pub fn mean_lasso(&self) -> f64 {
        self.rows.iter().map(|r| r.l2_lasso).sum::<f64>() / self.rows.len() as f64
    }

    pub fn lasso_wins(&self) -> usize {
        self.rows.iter().filter(|r| r.l2_lasso < r.l2_noisy).count()
    }

    pub fn summary(&self) -> String {
        let threshold = self.threshold.map_or("none".to_string(), |t| t.to_string());
        format!(
            "# summary N={} card_I={} threshold={} sigma={} mean_l2_noisy={} mean_l2_lasso={} lasso_better={}/{}\n",
            self.n,
            self.card,
            threshold,
            self.sigma,
            self.mean_noisy(),
            self.mean_lasso(),
            self.lasso_wins(),
            self.rows.len()
        )
    }
}

fn mode(cfg: &Config) -> Result<Mode, CliError> {
    match cfg.get("mode")? {
        "fresh" => Ok(Mode::Fresh),
        "same" => Ok(Mode::Same),
        other => Err(CliError::Config(format!("unknown mode `{other}`; expected fresh or same"))),
    }
}

/// Largest hyperbolic cross with `|I| <= max_card` for which `exact` yields
/// a lattice, searched by bisection on `log(threshold)`.
pub fn largest_exact_cross(
    d: usize,
    w: &ProductWeights,
    max_card: usize,
    exact: impl Fn(&IndexSet) -> Result<Option<Rank1Lattice>, CliError>,
) -> Result<(f64, IndexSet, Rank1Lattice), CliError> {
    let admissible = |log_t: f64| -> Result<Option<(IndexSet, Rank1Lattice)>, CliError> {
        let set = enumerate_cross(d, log_t.exp(), w, Basis::Trig, DEFAULT_CAP)?;
        if set.len() > max_card {
            return Ok(None);
        }
        Ok(exact(&set)?.map(|l| (set, l)))
    };
    let mut lo = 0.0f64;
    let mut best = admissible(lo)?
        .ok_or_else(|| CliError::Runtime("no exact lattice even for the smallest index set".into()))?;
    let mut hi = 1.0f64;
    while let Some(found) = admissible(hi)? {
        lo = hi;
        best = found;
        hi *= 2.0;
        if hi > 700.0 {
            return Ok((lo.exp(), best.0, best.1));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match admissible(mid)? {
            Some(found) => {
                lo = mid;
                best = found;
            }
            None => hi = mid,
        }
    }
    Ok((lo.exp(), best.0, best.1))
}

pub fn setup(cfg: &Config) -> Result<Setup, CliError> {
    let d = cfg.usize("d")?;
    let function = TestFunction::parse(cfg.get("function")?, d, None)?;
    let n = cfg.u64("n")?;
    match function.basis() {
        Basis::Walsh(b) => {
            if exact_log(n, b).is_none() {
                return Err(CliError::Config(format!("N = {n} is not a power of {b}")));
            }
            // equispaced grid, exact for all Walsh indices below N
            let points = PointSet::grid_1d(n);
            let set = IndexSet::from_members(function.basis(), 1, (0..(n / 2) as i64).map(|h| vec![h]).collect())?;
            let fhat = function.coefficients(&set);
            Ok(Setup { function, set, exact_points: points.clone(), points, threshold: None, fhat })
        }
        Basis::Trig => {
            let set_w = ProductWeights::new(cfg.f64("set_alpha")?, cfg.gamma("gamma")?)?;
            let cbc = match cfg.get("lattice")? {
                "recon" => None,
                "R" => Some(cbc_rank1(n, d, &cfg.weights()?, CriterionKind::R)?.0),
                other => return Err(CliError::Config(format!("unknown lattice `{other}`; expected recon or R"))),
            };
            let exact = |set: &IndexSet| -> Result<Option<Rank1Lattice>, CliError> {
                match &cbc {
                    Some(l) => Ok(verify_reconstruction(l, set)?.then(|| l.clone())),
                    None => Ok(cbc_reconstruction(n, set)?),
                }
            };
            let (threshold, set, lattice) = match cfg.get("threshold")? {
                "auto" => largest_exact_cross(d, &set_w, (n / 2) as usize, exact)?,
                _ => {
                    let t = cfg.f64("threshold")?;
                    let set = enumerate_cross(d, t, &set_w, Basis::Trig, DEFAULT_CAP)?;
                    let lattice = match &cbc {
                        Some(l) => l.clone(),
                        None => cbc_reconstruction(n, &set)?
                            .ok_or_else(|| CliError::Runtime(format!("no reconstruction lattice at N = {n}")))?,
                    };
                    (t, set, lattice)
                }
            };
            let points = generate_points(&lattice);
            let exact_points = if verify_reconstruction(&lattice, &set)? {
                points.clone()
            } else {
                generate_points(&recon_search(&set, 100 * n.max(set.len() as u64))?)
            };
            let fhat = function.coefficients(&set);
            Ok(Setup { function, set, points, exact_points, threshold: Some(threshold), fhat })
        }
    }
}

/// Runs the trials for one `lambda`.
pub fn trials(cfg: &Config, setup: &Setup, lambda: f64) -> Result<DenoiseReport, CliError> {
    let mode = mode(cfg)?;
    let count = cfg.usize("trials")?;
    let seed = cfg.u64("seed")?;
    let snr_db = cfg.f64("snr_db")?;
    let f = &setup.function;
    let clean = SampleSet::from_fn(setup.points.clone(), |x| f.eval(x))?;
    let clean_exact = match mode {
        Mode::Fresh => Some(SampleSet::from_fn(setup.exact_points.clone(), |x| f.eval(x))?),
        Mode::Same => None,
    };
    let norm_sq = f.norm_sq();
    let rows: Vec<Result<(TrialRow, f64), CliError>> = (0..count)
        .into_par_iter()
        .map(|t| {
            let s = seed.wrapping_add(t as u64);
            let (noisy, sigma) = add_noise(&clean, NoiseSpec { snr_db, seed: s })?;
            let plain = qmc_hyperinterp(&noisy, &setup.set)?;
            let lasso = match &clean_exact {
                Some(c) => {
                    // fresh draw, seeded away from every plain-trial seed
                    let fresh_seed = s.wrapping_add(count as u64);
                    let (fresh, _) = add_noise(c, NoiseSpec { snr_db, seed: fresh_seed })?;
                    lasso_qmc_hyperinterp(&fresh, &setup.set, lambda)?
                }
                None => shrink(&plain, lambda)?,
            };
            let bound = sigma * (setup.set.len() as f64 / noisy.len() as f64).sqrt();
            Ok((
                TrialRow {
                    trial: t,
                    seed: s,
                    l2_noisy: l2_error_analytic(&plain, &setup.fhat, norm_sq)?,
                    l2_lasso: l2_error_analytic(&lasso, &setup.fhat, norm_sq)?,
                    bound,
                    lambda,
                },
                sigma,
            ))
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut sigma = 0.0;
    for r in rows {
        let (row, s) = r?;
        sigma = s;
        out.push(row);
    }
    Ok(DenoiseReport {
        rows: out,
        card: setup.set.len(),
        n: setup.points.len(),
        threshold: setup.threshold,
        sigma,
    })
}

pub fn run(cfg: &Config) -> Result<DenoiseReport, CliError> {
    let setup = setup(cfg)?;
    trials(cfg, &setup, cfg.f64("lambda")?)
}

pub fn render(cfg: &Config, report: &DenoiseReport) -> String {
    let mut out = cfg.header();
    out.push_str("trial,seed,l2_noisy,l2_lasso,bound,lambda\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{:e},{:e},{:e},{}\n",
            r.trial, r.seed, r.l2_noisy, r.l2_lasso, r.bound, r.lambda
        ));
    }
    out.push_str(&report.summary());
    out
}

/// Mean errors over a grid of `lambda` values, one CSV row per value.
pub fn scan(cfg: &Config) -> Result<String, CliError> {
    let grid = cfg.list_f64("lambda_grid")?;
    let setup = setup(cfg)?;
    let mut out = cfg.header();
    out.push_str("lambda,mean_l2_noisy,mean_l2_lasso,lasso_better\n");
    for lambda in grid {
        let report = trials(cfg, &setup, lambda)?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            lambda,
            report.mean_noisy(),
            report.mean_lasso(),
            report.lasso_wins()
        ));
    }
    Ok(out)
}
