//! Experiment configuration files.
//!
//! ```text
//! # comments start with '#'
//! [experiment]
//! mode = sweep
//! seed = 7
//!
//! [domain]
//! bc = neumann
//! nx = 511
//!
//! [sweep]
//! lambda_min = 2
//! lambda_max = 6
//! ```
//!
//! Every key belongs to exactly one section (see [`KEYS`]). Omitted keys take
//! their documented default; command-line `key=value` overrides replace file
//! values.

use crate::kernels::{InitialCondition, KernelParams};
use crate::sim::{BoundaryCondition, NoiseCoefficient, SimConfig, CONTINUUM_WINDOW};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    KernelsCheck,
    Renewal,
    PamValidate,
    Sweep,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "kernels-check" => Some(Self::KernelsCheck),
            "renewal" => Some(Self::Renewal),
            "pam-validate" => Some(Self::PamValidate),
            "sweep" => Some(Self::Sweep),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::KernelsCheck => "kernels-check",
            Self::Renewal => "renewal",
            Self::PamValidate => "pam-validate",
            Self::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    CommandLine,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Line(n) => write!(f, "line {n}"),
            Self::CommandLine => f.write_str("command line"),
            Self::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: cannot parse `{text}` (expected `key = value` or `[section]`)")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("{origin}: unknown key `{key}`{}", suggestion.as_ref().map(|s| format!("; did you mean `{s}`?")).unwrap_or_default())]
    UnknownKey { key: String, origin: Origin, suggestion: Option<String> },
    #[error("line {line}: key `{key}` belongs in section [{expected}]")]
    WrongSection { line: usize, key: String, expected: &'static str },
    #[error("line {line}: key `{key}` given twice (first at line {first})")]
    Duplicate { line: usize, first: usize, key: String },
    #[error("missing required key `{key}` (section [{section}]) for mode {mode}")]
    Missing { key: &'static str, section: &'static str, mode: String },
    #[error("{origin}: invalid value for `{key}`: {message}")]
    Invalid { key: String, origin: Origin, message: String },
}

pub struct KeySpec {
    pub name: &'static str,
    pub section: &'static str,
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn key(name: &'static str, section: &'static str, default: Option<&'static str>, doc: &'static str) -> KeySpec {
    KeySpec { name, section, default, doc }
}

/// Every accepted key, its section, default and meaning.
pub const KEYS: &[KeySpec] = &[
    key("mode", "experiment", None, "kernels-check | renewal | pam-validate | sweep"),
    key("seed", "experiment", Some("1"), "master seed"),
    key("out", "experiment", Some("out"), "output directory"),
    key("workers", "experiment", Some("0"), "worker threads, 0 = available parallelism"),
    key("replicas", "experiment", Some("1000"), "Monte Carlo replicas per lambda"),
    key("synthetic_exponent", "experiment", None, "sweep only: skip simulation and use log E = scale * lambda^p"),
    key("synthetic_scale", "experiment", Some("1"), "scale of the synthetic log-energy"),
    key("length", "domain", Some("1"), "interval length L"),
    key("nu", "domain", Some("0.5"), "diffusion coefficient (0.5 generates 1/2 Laplacian)"),
    key("bc", "domain", Some("dirichlet"), "dirichlet | neumann"),
    key("nx", "domain", Some("255"), "interior grid points; dx = L/(nx+1)"),
    key("dt", "domain", Some("auto"), "time step; auto = largest CFL-admissible step dividing t"),
    key("t", "domain", Some("0.02"), "observation time"),
    key("sigma", "noise", Some("linear"), "linear | sine"),
    key("sigma_c", "noise", Some("1"), "slope c of sigma"),
    key("sigma_delta", "noise", Some("0"), "sine perturbation amplitude, 0 <= delta < 1"),
    key("init", "initial", Some("bump"), "bump | flat"),
    key("center", "initial", Some("0.5"), "bump center"),
    key("half_width", "initial", Some("0.2"), "bump half-width"),
    key("height", "initial", Some("1"), "bump or flat height"),
    key("lambda_min", "sweep", None, "smallest noise level"),
    key("lambda_max", "sweep", None, "largest noise level"),
    key("lambda_count", "sweep", Some("5"), "number of geometric lambda points"),
    key("eps", "sweep", Some("auto"), "wall distance for I_eps; auto = L/4"),
    key("window_limit", "sweep", Some("0.2"), "largest lambda^2*dx admitted to the fit"),
    key("kernel_nu", "kernels", Some("1"), "diffusion coefficient of the kernel checks"),
    key("kernel_times", "kernels", Some("0.001, 0.01, 0.1, 0.5"), "times of the inequality grid"),
    key("kernel_step", "kernels", Some("0.05"), "spatial step of the check grid, as a fraction of L"),
    key("kernel_tol", "kernels", Some("1e-12"), "image truncation tolerance"),
    key("kernel_eps", "kernels", Some("0.25"), "epsilon of the half-bound check"),
    key("ratio_horizon", "kernels", Some("1"), "horizon T of the certified Neumann/Gaussian constant"),
    key("renewal_a", "renewal", Some("1"), "constant term a"),
    key("renewal_b", "renewal", Some("1"), "coefficient b"),
    key("renewal_k", "renewal", Some("1"), "parameter k of the solver check"),
    key("renewal_t", "renewal", Some("1"), "horizon T"),
    key("renewal_n", "renewal", Some("4096"), "grid steps"),
    key("k_min", "renewal", Some("100"), "smallest k of the exponent fit"),
    key("k_max", "renewal", Some("10000"), "largest k of the exponent fit"),
    key("k_count", "renewal", Some("9"), "number of geometric k points"),
    key("pam_lambdas", "pam", Some("0.5, 1, 2"), "noise levels compared with the exact moment"),
    key("pam_x", "pam", Some("0.5"), "comparison point"),
];

const SECTIONS: &[&str] = &["experiment", "domain", "noise", "initial", "sweep", "kernels", "renewal", "pam"];

fn spec(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

fn suggest(name: &str) -> Option<String> {
    KEYS.iter()
        .map(|k| (strsim::jaro_winkler(name, k.name), k.name))
        .filter(|(score, _)| *score > 0.7)
        .fold(None, |best: Option<(f64, &str)>, cand| match best {
            Some(b) if b.0 >= cand.0 => Some(b),
            _ => Some(cand),
        })
        .map(|(_, n)| n.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
    pub replicas: usize,
    pub synthetic_exponent: Option<f64>,
    pub synthetic_scale: f64,

    pub length: f64,
    pub nu: f64,
    pub bc: BoundaryCondition,
    pub nx: usize,
    /// Resolved time step.
    pub dt: f64,
    pub t: f64,
    pub sigma: NoiseCoefficient,
    pub init: InitialCondition,

    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
    pub eps: f64,
    pub window_limit: f64,

    pub kernel_nu: f64,
    pub kernel_times: Vec<f64>,
    pub kernel_step: f64,
    pub kernel_tol: f64,
    pub kernel_eps: f64,
    pub ratio_horizon: f64,

    pub renewal_a: f64,
    pub renewal_b: f64,
    pub renewal_k: f64,
    pub renewal_t: f64,
    pub renewal_n: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub k_count: usize,

    pub pam_lambdas: Vec<f64>,
    pub pam_x: f64,

    /// Resolved `key = value` pairs in [`KEYS`] order.
    pub resolved: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

/// Raw values before typing, with their origin.
#[derive(Debug, Default)]
struct RawConfig {
    values: BTreeMap<String, (String, Origin)>,
}

fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::default();
    let mut section: Option<String> = None;
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let body = full.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::UnknownSection { line, section: name.to_string() });
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: body.to_string() });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax { line, text: body.to_string() });
        }
        let Some(ks) = spec(k) else {
            return Err(ConfigError::UnknownKey {
                key: k.to_string(),
                origin: Origin::Line(line),
                suggestion: suggest(k),
            });
        };
        if section.as_deref() != Some(ks.section) {
            return Err(ConfigError::WrongSection { line, key: k.to_string(), expected: ks.section });
        }
        if let Some((_, Origin::Line(first))) = raw.values.get(k) {
            return Err(ConfigError::Duplicate { line, first: *first, key: k.to_string() });
        }
        raw.values.insert(k.to_string(), (v.to_string(), Origin::Line(line)));
    }
    Ok(raw)
}

/// Parses a configuration file with no overrides.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with_overrides(text, &[])
}

/// Parses a configuration file, then applies `key=value` overrides.
pub fn parse_config_with_overrides(
    text: &str,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig, ConfigError> {
    let mut raw = parse_raw(text)?;
    for (k, v) in overrides {
        if spec(k).is_none() {
            return Err(ConfigError::UnknownKey {
                key: k.clone(),
                origin: Origin::CommandLine,
                suggestion: suggest(k),
            });
        }
        raw.values.insert(k.clone(), (v.clone(), Origin::CommandLine));
    }
    Typed { raw }.build()
}

struct Typed {
    raw: RawConfig,
}

impl Typed {
    fn get(&self, name: &'static str) -> Option<(&str, Origin)> {
        if let Some((v, o)) = self.raw.values.get(name) {
            return Some((v.as_str(), *o));
        }
        spec(name).and_then(|s| s.default).map(|d| (d, Origin::Default))
    }

    fn invalid(name: &str, origin: Origin, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid { key: name.to_string(), origin, message: message.into() }
    }

    fn origin(&self, name: &'static str) -> Origin {
        self.get(name).map(|(_, o)| o).unwrap_or(Origin::Default)
    }

    fn text(&self, name: &'static str) -> Result<(String, Origin), ConfigError> {
        self.get(name).map(|(v, o)| (v.to_string(), o)).ok_or_else(|| Self::invalid(name, Origin::Default, "no value"))
    }

    fn real(&self, name: &'static str) -> Result<f64, ConfigError> {
        let (v, o) = self.text(name)?;
        let x: f64 = v.parse().map_err(|_| Self::invalid(name, o, format!("`{v}` is not a number")))?;
        if !x.is_finite() {
            return Err(Self::invalid(name, o, "must be finite"));
        }
        Ok(x)
    }

    fn positive(&self, name: &'static str) -> Result<f64, ConfigError> {
        let x = self.real(name)?;
        if x <= 0.0 {
            return Err(Self::invalid(name, self.origin(name), format!("must be positive, got {x}")));
        }
        Ok(x)
    }

    fn count(&self, name: &'static str, min: usize) -> Result<usize, ConfigError> {
        let (v, o) = self.text(name)?;
        let n: usize = v.parse().map_err(|_| Self::invalid(name, o, format!("`{v}` is not a nonnegative integer")))?;
        if n < min {
            return Err(Self::invalid(name, o, format!("must be at least {min}, got {n}")));
        }
        Ok(n)
    }

    fn list(&self, name: &'static str) -> Result<Vec<f64>, ConfigError> {
        let (v, o) = self.text(name)?;
        let xs: Vec<f64> = v
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Self::invalid(name, o, format!("`{v}` is not a comma-separated list of numbers")))?;
        if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) {
            return Err(Self::invalid(name, o, "need finite numbers"));
        }
        Ok(xs)
    }

    fn require(&self, name: &'static str, mode: Mode) -> Result<(), ConfigError> {
        if self.get(name).is_none() {
            let section = spec(name).map(|s| s.section).unwrap_or("");
            return Err(ConfigError::Missing { key: name, section, mode: mode.to_string() });
        }
        Ok(())
    }

    fn build(self) -> Result<ExperimentConfig, ConfigError> {
        if self.get("mode").is_none() {
            return Err(ConfigError::Missing { key: "mode", section: "experiment", mode: "any".into() });
        }
        let (mode_text, mode_origin) = self.text("mode")?;
        let mode = Mode::parse(&mode_text).ok_or_else(|| {
            Self::invalid(
                "mode",
                mode_origin,
                format!("`{mode_text}` is not one of kernels-check, renewal, pam-validate, sweep"),
            )
        })?;
        if mode == Mode::Sweep && self.get("synthetic_exponent").is_none() {
            self.require("lambda_min", mode)?;
            self.require("lambda_max", mode)?;
        }

        let seed_text = self.text("seed")?;
        let seed: u64 =
            seed_text.0.parse().map_err(|_| Self::invalid("seed", seed_text.1, "not an unsigned 64-bit integer"))?;
        let length = self.positive("length")?;
        let nu = self.positive("nu")?;
        let (bc_text, bc_origin) = self.text("bc")?;
        let bc = match bc_text.as_str() {
            "dirichlet" => BoundaryCondition::Dirichlet,
            "neumann" => BoundaryCondition::Neumann,
            other => return Err(Self::invalid("bc", bc_origin, format!("`{other}` is not dirichlet or neumann"))),
        };
        let nx = self.count("nx", 1)?;
        let t = self.positive("t")?;
        let dx = length / (nx + 1) as f64;

        let (dt_text, dt_origin) = self.text("dt")?;
        let dt = if dt_text == "auto" {
            SimConfig::max_stable_dt_dividing(length, nx, nu, t)
        } else {
            let dt = self.positive("dt")?;
            let ratio = nu * dt / (dx * dx);
            if ratio > crate::sim::CFL_LIMIT * (1.0 + 1e-12) {
                return Err(Self::invalid(
                    "dt",
                    dt_origin,
                    format!(
                        "dt = {dt} with nx = {nx} (dx = {dx:.6e}) gives nu*dt/dx^2 = {ratio:.4} > {}; need dt <= {:.6e}",
                        crate::sim::CFL_LIMIT,
                        SimConfig::max_stable_dt(length, nx, nu)
                    ),
                ));
            }
            let steps = t / dt;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                return Err(Self::invalid(
                    "dt",
                    dt_origin,
                    format!("t = {t} is not a whole number of steps of dt = {dt}"),
                ));
            }
            dt
        };

        let (sigma_text, sigma_origin) = self.text("sigma")?;
        let sigma_c = self.positive("sigma_c")?;
        let sigma = match sigma_text.as_str() {
            "linear" => NoiseCoefficient::Linear { c: sigma_c },
            "sine" => {
                let delta = self.real("sigma_delta")?;
                if !(0.0..1.0).contains(&delta) {
                    return Err(Self::invalid("sigma_delta", self.origin("sigma_delta"), "need 0 <= delta < 1"));
                }
                NoiseCoefficient::SinePerturbed { c: sigma_c, delta }
            }
            other => return Err(Self::invalid("sigma", sigma_origin, format!("`{other}` is not linear or sine"))),
        };

        let (init_text, init_origin) = self.text("init")?;
        let height = self.real("height")?;
        let init = match init_text.as_str() {
            "bump" => InitialCondition::Bump {
                center: self.real("center")?,
                half_width: self.positive("half_width")?,
                height,
            },
            "flat" => InitialCondition::Flat { height },
            other => return Err(Self::invalid("init", init_origin, format!("`{other}` is not bump or flat"))),
        };
        init.validate(length).map_err(|e| Self::invalid("init", init_origin, e.to_string()))?;

        let lambda_min = if self.get("lambda_min").is_some() { self.positive("lambda_min")? } else { 1.0 };
        let lambda_max = if self.get("lambda_max").is_some() { self.positive("lambda_max")? } else { lambda_min };
        if lambda_max < lambda_min {
            return Err(Self::invalid(
                "lambda_max",
                self.origin("lambda_max"),
                format!("{lambda_max} < lambda_min = {lambda_min}"),
            ));
        }
        let lambda_count = self.count("lambda_count", 1)?;
        let (eps_text, eps_origin) = self.text("eps")?;
        let eps = if eps_text == "auto" { 0.25 * length } else { self.real("eps")? };
        if !(eps >= 0.0 && eps < 0.5 * length) {
            return Err(Self::invalid("eps", eps_origin, format!("need 0 <= eps < L/2, got {eps}")));
        }
        let window_limit = self.positive("window_limit")?;

        let synthetic_exponent = match self.get("synthetic_exponent") {
            Some(_) => Some(self.positive("synthetic_exponent")?),
            None => None,
        };
        if synthetic_exponent.is_some() && mode != Mode::Sweep {
            return Err(Self::invalid(
                "synthetic_exponent",
                self.origin("synthetic_exponent"),
                "only valid in sweep mode",
            ));
        }

        let kernel_times = self.list("kernel_times")?;
        if kernel_times.iter().any(|t| *t <= 0.0) {
            return Err(Self::invalid("kernel_times", self.origin("kernel_times"), "times must be positive"));
        }
        let kernel_step = self.positive("kernel_step")?;
        if kernel_step > 0.5 {
            return Err(Self::invalid("kernel_step", self.origin("kernel_step"), "must be at most 0.5"));
        }
        let kernel_eps = self.positive("kernel_eps")?;
        if kernel_eps >= 0.5 {
            return Err(Self::invalid("kernel_eps", self.origin("kernel_eps"), "must be below 0.5 (fraction of L)"));
        }
        let k_min = self.positive("k_min")?;
        let k_max = self.positive("k_max")?;
        if k_max < k_min {
            return Err(Self::invalid("k_max", self.origin("k_max"), format!("{k_max} < k_min = {k_min}")));
        }
        let pam_lambdas = self.list("pam_lambdas")?;
        if pam_lambdas.iter().any(|l| *l < 0.0) {
            return Err(Self::invalid("pam_lambdas", self.origin("pam_lambdas"), "noise levels must be nonnegative"));
        }
        let pam_x = self.real("pam_x")?;
        if !(0.0..=length).contains(&pam_x) {
            return Err(Self::invalid("pam_x", self.origin("pam_x"), format!("must lie in [0, {length}]")));
        }

        let mut warnings = Vec::new();
        if mode == Mode::Sweep && synthetic_exponent.is_none() && lambda_max * lambda_max * dx > window_limit {
            warnings.push(format!(
                "lambda_max^2*dx = {:.3} exceeds the continuum window {window_limit}; points beyond it are dropped from the fit",
                lambda_max * lambda_max * dx
            ));
        }
        if window_limit > CONTINUUM_WINDOW {
            warnings.push(format!("window_limit {window_limit} is wider than the recommended {CONTINUUM_WINDOW}"));
        }

        let resolved = KEYS
            .iter()
            .filter_map(|k| match k.name {
                "dt" => Some(("dt".to_string(), format!("{dt:e}"))),
                "eps" => Some(("eps".to_string(), format!("{eps}"))),
                _ => self.get(k.name).map(|(v, _)| (k.name.to_string(), v.to_string())),
            })
            .map(|(k, v)| if k == "mode" { (k, mode.to_string()) } else { (k, v) })
            .collect();

        Ok(ExperimentConfig {
            mode,
            seed,
            out: PathBuf::from(self.text("out")?.0),
            workers: self.count("workers", 0)?,
            replicas: self.count("replicas", 2)?,
            synthetic_exponent,
            synthetic_scale: self.positive("synthetic_scale")?,
            length,
            nu,
            bc,
            nx,
            dt,
            t,
            sigma,
            init,
            lambda_min,
            lambda_max,
            lambda_count,
            eps,
            window_limit,
            kernel_nu: self.positive("kernel_nu")?,
            kernel_times,
            kernel_step,
            kernel_tol: self.positive("kernel_tol")?,
            kernel_eps,
            ratio_horizon: self.positive("ratio_horizon")?,
            renewal_a: self.positive("renewal_a")?,
            renewal_b: self.positive("renewal_b")?,
            renewal_k: self.positive("renewal_k")?,
            renewal_t: self.positive("renewal_t")?,
            renewal_n: self.count("renewal_n", 2)?,
            k_min,
            k_max,
            k_count: self.count("k_count", 3)?,
            pam_lambdas,
            pam_x,
            resolved,
            warnings,
        })
    }
}

impl ExperimentConfig {
    /// Simulation parameters at noise level `lambda`.
    pub fn sim_config(&self, lambda: f64) -> SimConfig {
        SimConfig {
            params: KernelParams::new(self.length, self.nu).expect("validated"),
            bc: self.bc,
            sigma: self.sigma,
            u0: self.init.clone(),
            nx: self.nx,
            dt: self.dt,
            t_end: self.t,
            lambda,
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        crate::stats::geometric_grid(self.lambda_min, self.lambda_max, self.lambda_count)
    }

    /// Every resolved value except `out` and `workers`, which do not affect results.
    pub fn canonical(&self) -> String {
        self.resolved.iter().filter(|(k, _)| k != "out" && k != "workers").map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[experiment]\nmode = sweep\n[sweep]\nlambda_min = 2\nlambda_max = 6\n";

    #[test]
    fn minimal_sweep_uses_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.mode, Mode::Sweep);
        assert_eq!(c.seed, 1);
        assert_eq!(c.nx, 255);
        assert_eq!(c.nu, 0.5);
        assert_eq!(c.bc, BoundaryCondition::Dirichlet);
        assert_eq!(c.lambda_count, 5);
        assert_eq!(c.eps, 0.25);
        assert_eq!(c.replicas, 1000);
        assert!(c.resolved.iter().any(|(k, v)| k == "nx" && v == "255"));
        let steps = c.t / c.dt;
        assert!((steps - steps.round()).abs() < 1e-9);
    }

    #[test]
    fn cfl_violation_names_dt_and_nx() {
        let text = format!("{MINIMAL}[domain]\nnx = 511\ndt = 1e-4\n");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, ConfigError::Invalid { ref key, origin: Origin::Line(8), .. } if key == "dt"), "{msg}");
        assert!(msg.contains("nx = 511") && msg.contains("need dt <="), "{msg}");
    }

    #[test]
    fn unknown_key_suggests() {
        let err = parse_config("[sweep]\nlamda = 3\n").unwrap_err();
        match err {
            ConfigError::UnknownKey { key, origin, suggestion } => {
                assert_eq!(key, "lamda");
                assert_eq!(origin, Origin::Line(2));
                assert_eq!(suggestion.as_deref(), Some("lambda_min"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn missing_required() {
        let err = parse_config("[experiment]\nmode = sweep\n").unwrap_err();
        assert!(matches!(err, ConfigError::Missing { key: "lambda_min", .. }));
        assert!(matches!(parse_config("").unwrap_err(), ConfigError::Missing { key: "mode", .. }));
    }

    #[test]
    fn syntax_and_sections() {
        assert!(matches!(parse_config("[experiment]\nmode\n").unwrap_err(), ConfigError::Syntax { line: 2, .. }));
        assert!(matches!(parse_config("[bogus]\n").unwrap_err(), ConfigError::UnknownSection { line: 1, .. }));
        assert!(matches!(
            parse_config("[domain]\nmode = sweep\n").unwrap_err(),
            ConfigError::WrongSection { line: 2, .. }
        ));
        assert!(matches!(
            parse_config("[experiment]\nmode = sweep\nmode = renewal\n").unwrap_err(),
            ConfigError::Duplicate { line: 3, first: 2, .. }
        ));
    }

    #[test]
    fn overrides_win_and_hash_ignores_workers() {
        let base = parse_config(MINIMAL).unwrap();
        let over = parse_config_with_overrides(MINIMAL, &[("nx".into(), "127".into()), ("workers".into(), "8".into())])
            .unwrap();
        assert_eq!(over.nx, 127);
        assert_ne!(base.config_hash(), over.config_hash());
        let w = parse_config_with_overrides(MINIMAL, &[("workers".into(), "8".into())]).unwrap();
        assert_eq!(w.workers, 8);
        assert_eq!(base.config_hash(), w.config_hash());
        let bad = parse_config_with_overrides(MINIMAL, &[("lamda".into(), "1".into())]).unwrap_err();
        assert!(matches!(bad, ConfigError::UnknownKey { origin: Origin::CommandLine, .. }));
    }

    #[test]
    fn value_errors_carry_lines() {
        let err = parse_config(&format!("{MINIMAL}[domain]\nbc = periodic\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { origin: Origin::Line(7), .. }), "{err}");
        let err = parse_config("[experiment]\nmode = sweep\n[sweep]\nlambda_min = 3\nlambda_max = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref key, .. } if key == "lambda_max"));
    }

    #[test]
    fn window_warning_issued() {
        let c =
            parse_config("[experiment]\nmode = sweep\n[domain]\nnx = 63\n[sweep]\nlambda_min = 2\nlambda_max = 6\n")
                .unwrap();
        assert_eq!(c.warnings.len(), 1);
    }
}
