//! `timing`: cost of a reconstruction-property CBC search against a CBC-S
//! search of comparable size.
//!
//! For each `M` the index set is `{h : r(h)^2 <= M^tau}`. The reconstruction
//! search tries primes `N >= |I|` upward until it succeeds; the CBC-S search
//! then runs at that `N`. Both are timed on a single thread.

use std::time::{Duration, Instant};

use qmc_hyperinterp::index_set::{enumerate_cross, DEFAULT_CAP};
use qmc_hyperinterp::lattice::{cbc_rank1, cbc_reconstruction, next_prime, CriterionKind, Rank1Lattice};
use qmc_hyperinterp::{Basis, IndexSet};

use crate::config::Config;
use crate::error::CliError;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("d", "3"),
    ("alpha", "2"),
    ("gamma", "pow:1:2"),
    ("tau", "1.9"),
    ("ladder", "256,512,1024,2048,4096"),
    ("reps", "3"),
    ("max_n", "10000000"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub m: u64,
    pub card: usize,
    pub n: u64,
    pub t_recon: Duration,
    pub t_s: Duration,
}

/// Smallest prime `N >= max(|I|, 2)` admitting a reconstruction lattice.
pub fn recon_search(set: &IndexSet, max_n: u64) -> Result<Rank1Lattice, CliError> {
    let start = (set.len() as u64).max(2);
    let mut n = next_prime(start);
    while n <= max_n {
        if let Some(l) = cbc_reconstruction(n, set)? {
            return Ok(l);
        }
        n = next_prime(n + 1);
    }
    Err(CliError::Resource(format!("no reconstruction lattice with N <= {max_n}")))
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

pub fn run(cfg: &Config) -> Result<Vec<TimingRow>, CliError> {
    let d = cfg.usize("d")?;
    let w = cfg.weights()?;
    let tau = cfg.f64("tau")?;
    let reps = cfg.usize("reps")?;
    let max_n = cfg.u64("max_n")?;
    if reps < 3 {
        return Err(CliError::Config("reps must be at least 3".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| {
        let mut rows = Vec::new();
        for m in cfg.list_u64("ladder")? {
            let set = enumerate_cross(d, (m as f64).powf(tau), &w, Basis::Trig, DEFAULT_CAP)?;
            let mut recon_times = Vec::with_capacity(reps);
            let mut s_times = Vec::with_capacity(reps);
            let mut n = 0;
            for _ in 0..reps {
                let t0 = Instant::now();
                let lattice = recon_search(&set, max_n)?;
                recon_times.push(t0.elapsed());
                n = lattice.modulus();
                let t1 = Instant::now();
                cbc_rank1(n, d, &w, CriterionKind::S)?;
                s_times.push(t1.elapsed());
            }
            rows.push(TimingRow { m, card: set.len(), n, t_recon: median(recon_times), t_s: median(s_times) });
        }
        Ok(rows)
    })
}

pub fn render(cfg: &Config, rows: &[TimingRow]) -> String {
    let mut out = cfg.header();
    out.push_str("M,card_I,N,t_recon_cbc,t_s_cbc\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m,
            r.card,
            r.n,
            r.t_recon.as_secs_f64(),
            r.t_s.as_secs_f64()
        ));
    }
    out
}
