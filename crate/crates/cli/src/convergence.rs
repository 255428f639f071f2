//! `convergence`: error of QMC hyperinterpolation along a prime ladder.
//!
//! For each `N` the generating vector comes from a CBC search with weights
//! `(alpha, gamma)` and the index set is `{h : r(h)^2 <= N^tau}` with the
//! decay `r` taken at smoothness `set_alpha` and the same `gamma`.

use qmc_hyperinterp::gram::estimate_eta;
use qmc_hyperinterp::hyperinterp::{l2_error_analytic, qmc_hyperinterp, SampleSet};
use qmc_hyperinterp::index_set::{enumerate_cross, DEFAULT_CAP};
use qmc_hyperinterp::lattice::{cbc_rank1, generate_points, CriterionKind};
use qmc_hyperinterp::testbed::TestFunction;
use qmc_hyperinterp::{Basis, ProductWeights};

use crate::config::Config;
use crate::error::CliError;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("function", "kv"),
    ("d", "2"),
    ("alpha", "4"),
    ("gamma", "pow:1:3.5"),
    ("set_alpha", "3.4"),
    ("tau", "3.4"),
    ("omega", "pow:1:8"),
    ("kind", "R"),
    ("ladder", "127,251,509,1021,2039,4093"),
];

/// On lattices `eta` is an integer (largest aliasing class minus one), so a
/// computed value within this margin of 1 is 1.
pub const ETA_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    pub card: usize,
    pub eta: f64,
    /// `None` when the row was skipped because `eta >= 1`.
    pub l2_error: Option<f64>,
}

impl ConvergenceRow {
    pub fn retained(&self) -> bool {
        self.l2_error.is_some()
    }
}

pub fn test_function(cfg: &Config) -> Result<TestFunction, CliError> {
    let name = cfg.get("function")?;
    if !matches!(name, "kv" | "kv_weighted") {
        return Err(CliError::Config(format!("convergence supports kv and kv_weighted, not `{name}`")));
    }
    Ok(TestFunction::parse(name, cfg.usize("d")?, Some(cfg.gamma("omega")?))?)
}

pub fn kind(cfg: &Config) -> Result<CriterionKind, CliError> {
    match cfg.get("kind")? {
        "R" => Ok(CriterionKind::R),
        "S" => Ok(CriterionKind::S),
        other => Err(CliError::Config(format!("unknown kind `{other}`; expected R or S"))),
    }
}

pub fn run(cfg: &Config) -> Result<Vec<ConvergenceRow>, CliError> {
    let f = test_function(cfg)?;
    let d = cfg.usize("d")?;
    let w = cfg.weights()?;
    let set_w = ProductWeights::new(cfg.f64("set_alpha")?, cfg.gamma("gamma")?)?;
    let tau = cfg.f64("tau")?;
    let kind = kind(cfg)?;
    let mut rows = Vec::new();
    for n in cfg.list_u64("ladder")? {
        let (lattice, _) = cbc_rank1(n, d, &w, kind)?;
        let points = generate_points(&lattice);
        let set = enumerate_cross(d, (n as f64).powf(tau), &set_w, Basis::Trig, DEFAULT_CAP)?;
        let eta = estimate_eta(&points, &set)?.eta;
        let l2_error = if eta < 1.0 - ETA_MARGIN {
            let samples = SampleSet::from_fn(points, |x| f.eval(x))?;
            let approx = qmc_hyperinterp(&samples, &set)?;
            Some(l2_error_analytic(&approx, &f.coefficients(&set), f.norm_sq())?)
        } else {
            None
        };
        rows.push(ConvergenceRow { n, card: set.len(), eta, l2_error });
    }
    Ok(rows)
}

pub fn render(cfg: &Config, rows: &[ConvergenceRow]) -> String {
    let mut out = cfg.header();
    out.push_str("N,card_I,eta,l2_error,status\n");
    for r in rows {
        let (err, status) = match r.l2_error {
            Some(e) => (format!("{e:e}"), "ok"),
            None => ("nan".to_string(), "skipped_eta"),
        };
        out.push_str(&format!("{},{},{:e},{},{}\n", r.n, r.card, r.eta, err, status));
    }
    out
}

/// Least-squares slope of `log(l2_error)` against `log(N)` over retained rows.
pub fn loglog_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.l2_error.map(|e| ((r.n as f64).ln(), e.ln())))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
