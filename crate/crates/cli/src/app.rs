//! Argument parsing and dispatch for the `qmchi` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::error::CliError;
use crate::{construct, convergence, denoise, points, timing};

#[derive(Debug, Parser)]
#[command(name = "qmchi", version, about = "QMC hyperinterpolation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key=value` document; output headers can be passed back here.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CBC construction of a generating vector (R, S, recon or poly).
    Construct(ConstructArgs),
    /// Point set of a lattice as CSV.
    Points(PointsArgs),
    /// Approximation error along a prime ladder.
    Convergence(ConvergenceArgs),
    /// Wall-clock cost of reconstruction CBC against CBC-S.
    Timing(TimingArgs),
    /// Plain against Lasso hyperinterpolation of noisy samples.
    Denoise(DenoiseArgs),
    /// Mean denoising errors over a grid of lambda values.
    LambdaScan(DenoiseArgs),
}

macro_rules! flag_struct {
    ($name:ident { $($field:ident),* $(,)? } $(, $extra:ident : $ty:ty)*) => {
        #[derive(Debug, Args)]
        pub struct $name {
            #[command(flatten)]
            pub common: Common,
            $(
                #[arg(long)]
                pub $field: Option<String>,
            )*
            $(
                #[arg(long)]
                pub $extra: $ty,
            )*
        }

        impl $name {
            fn flags(&self) -> Vec<(&'static str, Option<String>)> {
                vec![$((stringify!($field), self.$field.clone())),*]
            }
        }
    };
}

flag_struct!(ConstructArgs { kind, n, d, alpha, gamma, m, b, modulus, threshold },
    cache: Option<PathBuf>, no_cache: bool);
flag_struct!(PointsArgs { lattice, n, z, fib_index, b, m, modulus, q, fib_poly_index, format });
flag_struct!(ConvergenceArgs { function, d, alpha, gamma, set_alpha, tau, omega, kind, ladder });
flag_struct!(TimingArgs { d, alpha, gamma, tau, ladder, reps, max_n });
flag_struct!(DenoiseArgs {
    preset, lattice, function, d, n, alpha, gamma, set_alpha, threshold, lambda, snr_db, trials, seed, mode, lambda_grid
});

/// Default vector cache in the working directory.
pub const DEFAULT_CACHE: &str = "qmchi-vectors.txt";

/// Text for stdout and optional file artifact.
struct Output {
    stdout: String,
    file: Option<(PathBuf, String)>,
    script: Option<(PathBuf, String)>,
}

fn emit(common: &Common, artifact: String, summary: String) -> Output {
    match &common.out {
        Some(path) => Output { stdout: summary, file: Some((path.clone(), artifact)), script: None },
        None => Output { stdout: artifact, file: None, script: None },
    }
}

/// Gnuplot script stub plotting the CSV at `csv`.
fn plot_script(csv: &Path, using: &str, logscale: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\n{logscale}plot '{}' using {using} with linespoints\n",
        csv.display()
    )
}

fn script_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".gp");
    PathBuf::from(s)
}

fn execute(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Construct(a) => {
            let cfg = Config::resolve("construct", construct::DEFAULTS, a.common.config.as_deref(), a.flags())?;
            let cache = if a.no_cache {
                None
            } else {
                Some(a.cache.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE)))
            };
            let report = construct::run(&cfg, cache.as_deref())?;
            let failed = report.recon.as_ref().is_some_and(|r| !r.success);
            let out = Output {
                stdout: report.summary(),
                file: a.common.out.clone().map(|p| (p, report.file_text(&cfg))),
                script: None,
            };
            if failed {
                write_output(&out)?;
                return Err(CliError::Runtime("no reconstruction lattice for this N".into()));
            }
            Ok(out)
        }
        Command::Points(a) => {
            let cfg = Config::resolve("points", points::DEFAULTS, a.common.config.as_deref(), a.flags())?;
            let csv = points::run(&cfg)?;
            let rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
            Ok(emit(&a.common, csv, format!("rows {rows}\n")))
        }
        Command::Convergence(a) => {
            let cfg =
                Config::resolve("convergence", convergence::DEFAULTS, a.common.config.as_deref(), a.flags())?;
            let rows = convergence::run(&cfg)?;
            let slope = convergence::loglog_slope(&rows).map_or("nan".to_string(), |s| s.to_string());
            let mut out = emit(&a.common, convergence::render(&cfg, &rows), format!("slope {slope}\n"));
            add_script(&mut out, "1:4", "set logscale xy\n");
            Ok(out)
        }
        Command::Timing(a) => {
            let cfg = Config::resolve("timing", timing::DEFAULTS, a.common.config.as_deref(), a.flags())?;
            let rows = timing::run(&cfg)?;
            let mut out = emit(&a.common, timing::render(&cfg, &rows), format!("rows {}\n", rows.len()));
            add_script(&mut out, "2:4", "set logscale xy\n");
            Ok(out)
        }
        Command::Denoise(a) | Command::LambdaScan(a) => {
            let name = if matches!(command, Command::Denoise(_)) { "denoise" } else { "lambda-scan" };
            let file_text = match &a.common.config {
                Some(p) => Some(std::fs::read_to_string(p).map_err(|e| {
                    CliError::Config(format!("cannot read config {}: {e}", p.display()))
                })?),
                None => None,
            };
            let preset = denoise::peek_preset(a.preset.as_deref(), file_text.as_deref());
            let defaults = denoise::defaults(&preset)?;
            let cfg = Config::resolve(name, &defaults, a.common.config.as_deref(), a.flags())?;
            if name == "denoise" {
                let report = denoise::run(&cfg)?;
                let mut out = emit(&a.common, denoise::render(&cfg, &report), report.summary());
                add_script(&mut out, "1:4", "");
                Ok(out)
            } else {
                if cfg.get("lambda_grid")?.is_empty() {
                    return Err(CliError::Config("lambda-scan needs --lambda-grid".into()));
                }
                let csv = denoise::scan(&cfg)?;
                let mut out = emit(&a.common, csv, String::new());
                add_script(&mut out, "1:3", "set logscale x\n");
                Ok(out)
            }
        }
    }
}

/// Adds a plot script next to a file artifact.
fn add_script(out: &mut Output, using: &str, logscale: &str) {
    if let Some((path, _)) = &out.file {
        let script = script_path(path);
        out.stdout.push_str(&format!("script {}\n", script.display()));
        out.script = Some((script, plot_script(path, using, logscale)));
    }
}

fn write_output(out: &Output) -> Result<(), CliError> {
    for (path, text) in out.file.iter().chain(&out.script) {
        std::fs::write(path, text)?;
    }
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(out.stdout.as_bytes())?;
    Ok(())
}

/// Runs the parsed command and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli.command).and_then(|o| write_output(&o)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
