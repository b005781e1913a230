//! The `spde-excite` command line.
//!
//! ```text
//! spde-excite <mode> --config <path> [--seed N] [--out DIR] [--workers N] [--synthetic P] [key=value ...]
//! ```
//!
//! Precedence, highest first: command-line flags and `key=value`
//! overrides, `SPDE_WORKERS` (workers only), the config file, defaults.

pub mod checks;
pub mod config;
pub mod report;

use crate::estimators::{energy_sweep, fit_rows, with_workers, EstimateError, SweepPlan, SweepResult, SweepRow};
use checks::{Check, CheckError};
use clap::Parser;
pub use config::{parse_config, parse_config_with_overrides, ConfigError, ExperimentConfig, Mode};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

pub const WORKERS_ENV: &str = "SPDE_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("config error: {0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Usage(_) | Self::Read { .. } => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spde-excite",
    version,
    about = "Noise-excitation experiments for stochastic heat equations on an interval"
)]
pub struct Args {
    /// kernels-check | renewal | pam-validate | sweep
    pub mode: String,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = available parallelism); overrides SPDE_WORKERS.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Sweep without simulation, using log E = synthetic_scale * lambda^P.
    #[arg(long, value_name = "P")]
    pub synthetic: Option<f64>,
    /// key=value overrides of config entries
    pub overrides: Vec<String>,
}

/// Resolves the configuration of `args`, reading `SPDE_WORKERS` from `env_workers`.
pub fn load_config(args: &Args, env_workers: Option<String>) -> Result<ExperimentConfig, CliError> {
    let text =
        std::fs::read_to_string(&args.config).map_err(|source| CliError::Read { path: args.config.clone(), source })?;
    let mut overrides = Vec::new();
    if let Some(w) = env_workers.filter(|w| !w.trim().is_empty()) {
        overrides.push(("workers".to_string(), w.trim().to_string()));
    }
    for o in &args.overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| CliError::Usage(format!("override `{o}` is not key=value")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    overrides.push(("mode".into(), args.mode.clone()));
    if let Some(s) = args.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    if let Some(o) = &args.out {
        overrides.push(("out".into(), o.display().to_string()));
    }
    if let Some(w) = args.workers {
        overrides.push(("workers".into(), w.to_string()));
    }
    if let Some(p) = args.synthetic {
        overrides.push(("synthetic_exponent".into(), p.to_string()));
    }
    Ok(parse_config_with_overrides(&text, &overrides)?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Write { path: path.clone(), source })?;
    Ok(path)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

pub struct ValidationOutcome {
    pub checks: Vec<Check>,
    pub passed: bool,
    pub path: PathBuf,
}

/// Runs the checks of a validation mode and writes `validation.json`.
pub fn run_validation(cfg: &ExperimentConfig) -> Result<ValidationOutcome, CliError> {
    let checks = match cfg.mode {
        Mode::KernelsCheck => checks::kernel_checks(cfg)?,
        Mode::Renewal => checks::renewal_checks(cfg)?,
        Mode::PamValidate => checks::pam_checks(cfg)?,
        Mode::Sweep => return Err(CliError::Usage("sweep is not a validation mode".into())),
    };
    let passed = checks.iter().all(|c| c.passed);
    let path = write(&cfg.out, "validation.json", &pretty(&report::validation_json(cfg, &checks)))?;
    Ok(ValidationOutcome { checks, passed, path })
}

pub struct SweepOutcome {
    pub result: SweepResult,
    pub files: Vec<PathBuf>,
}

fn synthetic_result(cfg: &ExperimentConfig, p: f64) -> SweepResult {
    let base = cfg.sim_config(0.0);
    let dx = base.dx();
    let rows = cfg
        .lambdas()
        .into_iter()
        .map(|lambda| {
            // No field is simulated, so the extrema are undefined.
            SweepRow {
                lambda,
                log_energy: cfg.synthetic_scale * lambda.powf(p),
                log_energy_ci: 0.0,
                inf: f64::NAN,
                sup: f64::NAN,
                sup_half_width: f64::NAN,
                inf_eps: f64::NAN,
                n_effective: cfg.replicas,
                failed: 0,
                unreliable: false,
                in_window: true,
            }
        })
        .collect();
    fit_rows(cfg.bc, cfg.t, cfg.eps, dx, cfg.window_limit, rows)
}

/// Runs a λ-sweep (or its synthetic stand-in) and writes `sweep.csv`,
/// `summary.json` and `loglog.svg`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome, CliError> {
    if cfg.mode != Mode::Sweep {
        return Err(CliError::Usage(format!("{} is not the sweep mode", cfg.mode)));
    }
    let result = match cfg.synthetic_exponent {
        Some(p) => synthetic_result(cfg, p),
        None => {
            let plan = SweepPlan {
                base: cfg.sim_config(cfg.lambda_min),
                lambdas: cfg.lambdas(),
                t: cfg.t,
                replicas: cfg.replicas,
                master_seed: cfg.seed,
                eps: cfg.eps,
                window_limit: cfg.window_limit,
            };
            with_workers(cfg.workers, || energy_sweep(&plan))??
        }
    };
    let synthetic = cfg.synthetic_exponent.is_some();
    let files = vec![
        write(&cfg.out, "sweep.csv", &report::sweep_csv(cfg, &result))?,
        write(&cfg.out, "summary.json", &pretty(&report::summary_json(cfg, &result, synthetic)))?,
        write(&cfg.out, "loglog.svg", &report::loglog_svg(cfg, &result))?,
    ];
    Ok(SweepOutcome { result, files })
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let cfg = load_config(args, std::env::var(WORKERS_ENV).ok())?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    if cfg.mode == Mode::Sweep {
        let out = run_sweep(&cfg)?;
        match &out.result.fit {
            Some(f) => println!("excitation index {:.4} (se {:.4}) over {} points", f.slope, f.slope_se, f.points),
            None => println!("excitation index undefined (insufficient points)"),
        }
        for f in &out.files {
            println!("wrote {}", f.display());
        }
        return Ok(EXIT_OK);
    }
    let out = run_validation(&cfg)?;
    for c in &out.checks {
        println!(
            "{} {:<32} worst {:.3e} allowed {:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.allowed
        );
    }
    println!("wrote {}", out.path.display());
    Ok(if out.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
