//! Monte Carlo estimates of `E|u_t(x)|²`, the energy
//! `E_t(λ) = √(E‖u_t‖²_{L²})`, the extrema `I_t`, `S_t`, `I_{ε,t}`, and the
//! excitation index fitted from a λ-sweep.
//!
//! Replicas are grouped in fixed chunks of [`CHUNK`] consecutive indices.
//! Chunks run on the current rayon pool and are merged in index order, so
//! every estimate is a pure function of `(config, master seed)` whatever
//! the number of workers.

use crate::sim::{self, derive_replica_seed, BoundaryCondition, Integrator, SimConfig, SimError};
use crate::stats::{self, FieldMoments, FitError, LogLogFit, RejectedPoint, RunningMoments};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Replicas per work unit.
pub const CHUNK: usize = 32;
/// Fraction of non-finite replicas above which an estimate is flagged.
pub const FAILURE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("observation time must lie in (0, t_end], got {0}")]
    BadTime(f64),
    #[error("need at least 2 replicas, got {0}")]
    TooFewReplicas(usize),
    #[error("epsilon {eps} must satisfy 0 <= eps < L/2 = {half}")]
    BadEpsilon { eps: f64, half: f64 },
    #[error("no grid point lies in [{eps}, L - {eps}]")]
    EmptyWindow { eps: f64 },
    #[error("every lambda in the sweep failed: {0}")]
    AllFailed(String),
    #[error("excitation index fit failed: {source}")]
    Fit { source: FitError, rejected: Vec<RejectedPoint> },
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

/// Mean and 95% half-width of a scalar estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldMoment {
    pub x: Vec<f64>,
    /// Sample mean of `u_t(x_j)²`.
    pub estimate: Vec<f64>,
    /// 95% normal-approximation half-width per point.
    pub half_width: Vec<f64>,
    pub replicas: usize,
    pub failed: usize,
    /// Per-path `‖u_t‖²_{L²}` (trapezoid), when estimated from paths.
    pub norm_sq: Option<Estimate>,
}

impl FieldMoment {
    pub fn effective(&self) -> usize {
        self.replicas - self.failed
    }

    /// More than [`FAILURE_TOLERANCE`] of the replicas produced non-finite values.
    pub fn unreliable(&self) -> bool {
        self.failed as f64 > FAILURE_TOLERANCE * self.replicas as f64
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (`0` = available parallelism).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, EstimateError> {
    let n = if workers == 0 { std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1) } else { workers };
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| EstimateError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

fn trapezoid_weight(j: usize, n: usize) -> f64 {
    if j == 0 || j + 1 == n {
        0.5
    } else {
        1.0
    }
}

struct Partial {
    field: FieldMoments,
    norm: RunningMoments,
    failed: usize,
}

pub fn second_moment_field(
    cfg: &SimConfig,
    t: f64,
    replicas: usize,
    master_seed: u64,
) -> Result<FieldMoment, EstimateError> {
    cfg.validate()?;
    if !(t > 0.0) {
        return Err(EstimateError::BadTime(t));
    }
    if replicas < 2 {
        return Err(EstimateError::TooFewReplicas(replicas));
    }
    let steps = cfg.steps_to(t).map_err(|_| EstimateError::BadTime(t))?;
    let nodes = cfg.node_count();
    let dx = cfg.dx();
    let chunks = replicas.div_ceil(CHUNK);

    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut integrator = Integrator::new(cfg);
            let mut field = Vec::with_capacity(nodes);
            let mut part = Partial { field: FieldMoments::new(nodes), norm: RunningMoments::new(), failed: 0 };
            for i in c * CHUNK..((c + 1) * CHUNK).min(replicas) {
                let seed = derive_replica_seed(master_seed, i as u64);
                match sim::terminal_field(&mut integrator, cfg, seed, steps, &mut field) {
                    Ok(()) => {
                        part.field.push(field.iter().map(|u| u * u));
                        let norm: f64 =
                            field.iter().enumerate().map(|(j, u)| trapezoid_weight(j, nodes) * u * u).sum::<f64>() * dx;
                        part.norm.push(norm);
                    }
                    Err(SimError::NonFinite { .. }) => part.failed += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(part)
        })
        .collect::<Result<_, SimError>>()?;

    let mut field = FieldMoments::new(nodes);
    let mut norm = RunningMoments::new();
    let mut failed = 0;
    for p in &partials {
        field.merge(&p.field);
        norm.merge(&p.norm);
        failed += p.failed;
    }
    let effective = replicas - failed;
    Ok(FieldMoment {
        x: cfg.node_positions(),
        estimate: field.slots().iter().map(|s| if effective > 0 { s.mean() } else { f64::NAN }).collect(),
        half_width: field.slots().iter().map(|s| s.half_width()).collect(),
        replicas,
        failed,
        norm_sq: (effective > 0).then(|| Estimate { mean: norm.mean(), half_width: norm.half_width() }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub log_energy: f64,
    /// Half-width of `E_t²`.
    pub energy_sq_half_width: f64,
    /// Delta-method half-width of `log E_t`.
    pub log_half_width: f64,
}

/// `√(Σ wⱼ E|u(xⱼ)|² dx)` with trapezoid weights `wⱼ`.
///
/// The uncertainty comes from the per-path norms when available; otherwise
/// the per-point half-widths are added, which bounds the fully correlated case.
pub fn energy_from_field(fm: &FieldMoment, dx: f64) -> EnergyEstimate {
    let n = fm.estimate.len();
    let weighted = |v: &[f64]| v.iter().enumerate().map(|(j, m)| trapezoid_weight(j, n) * m).sum::<f64>() * dx;
    let energy_sq = weighted(&fm.estimate);
    let hw = match fm.norm_sq {
        Some(e) => e.half_width,
        None => weighted(&fm.half_width),
    };
    EnergyEstimate {
        energy: energy_sq.sqrt(),
        log_energy: 0.5 * energy_sq.ln(),
        energy_sq_half_width: hw,
        log_half_width: 0.5 * hw / energy_sq,
    }
}

/// `I = min`, `S = max` over all nodes, and `I_ε = min` over nodes in `[ε, L − ε]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrema {
    pub inf: f64,
    pub sup: f64,
    pub inf_eps: f64,
    /// Half-width attached to `sup` at its arg-max.
    pub sup_half_width: f64,
}

pub fn field_extrema(fm: &FieldMoment, eps: f64) -> Result<Extrema, EstimateError> {
    let length = fm.x.last().copied().unwrap_or(0.0);
    if !(eps >= 0.0) || eps >= 0.5 * length {
        return Err(EstimateError::BadEpsilon { eps, half: 0.5 * length });
    }
    let slack = 1e-12 * length;
    let inf = fm.estimate.iter().copied().fold(f64::INFINITY, f64::min);
    let (arg_sup, sup) =
        fm.estimate
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (j, v)| if v > best.1 { (j, v) } else { best });
    let inf_eps =
        fm.x.iter()
            .zip(&fm.estimate)
            .filter(|(x, _)| **x >= eps - slack && **x <= length - eps + slack)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
    if inf_eps == f64::INFINITY {
        return Err(EstimateError::EmptyWindow { eps });
    }
    Ok(Extrema { inf, sup, inf_eps, sup_half_width: fm.half_width.get(arg_sup).copied().unwrap_or(0.0) })
}

/// OLS slope of `log log E` against `log λ` for samples `(λ, log E)`.
pub fn fit_excitation_index(samples: &[(f64, f64)]) -> Result<LogLogFit, EstimateError> {
    stats::fit_log_log(samples).map_err(|(source, rejected)| EstimateError::Fit { source, rejected })
}

/// One λ of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub log_energy: f64,
    pub log_energy_ci: f64,
    pub inf: f64,
    pub sup: f64,
    pub sup_half_width: f64,
    pub inf_eps: f64,
    pub n_effective: usize,
    pub failed: usize,
    pub unreliable: bool,
    /// `λ²·dx ≤` the continuum window limit.
    pub in_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub bc: BoundaryCondition,
    pub t: f64,
    pub eps: f64,
    pub dx: f64,
    pub window_limit: f64,
    pub rows: Vec<SweepRow>,
    /// λ values that entered the fit.
    pub fit_window: Vec<f64>,
    pub excluded: Vec<RejectedPoint>,
    pub fit: Option<stats::LinearFit>,
    /// Why `fit` is absent, if it is.
    pub fit_error: Option<String>,
}

/// Plain description of a λ-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub base: SimConfig,
    pub lambdas: Vec<f64>,
    pub t: f64,
    pub replicas: usize,
    pub master_seed: u64,
    pub eps: f64,
    pub window_limit: f64,
}

/// Runs the sweep. Every λ reuses the same replica seeds (common random numbers).
pub fn energy_sweep(plan: &SweepPlan) -> Result<SweepResult, EstimateError> {
    let dx = plan.base.dx();
    let mut rows = Vec::with_capacity(plan.lambdas.len());
    let mut last_error = None;
    for &lambda in &plan.lambdas {
        let cfg = SimConfig { lambda, ..plan.base.clone() };
        let fm = second_moment_field(&cfg, plan.t, plan.replicas, plan.master_seed)?;
        let in_window = lambda * lambda * dx <= plan.window_limit;
        if fm.effective() == 0 {
            last_error = Some(format!("all {} replicas non-finite at lambda = {lambda}", fm.replicas));
            rows.push(SweepRow {
                lambda,
                log_energy: f64::NAN,
                log_energy_ci: f64::NAN,
                inf: f64::NAN,
                sup: f64::NAN,
                sup_half_width: f64::NAN,
                inf_eps: f64::NAN,
                n_effective: 0,
                failed: fm.failed,
                unreliable: true,
                in_window,
            });
            continue;
        }
        let energy = energy_from_field(&fm, dx);
        let ext = field_extrema(&fm, plan.eps)?;
        rows.push(SweepRow {
            lambda,
            log_energy: energy.log_energy,
            log_energy_ci: energy.log_half_width,
            inf: ext.inf,
            sup: ext.sup,
            sup_half_width: ext.sup_half_width,
            inf_eps: ext.inf_eps,
            n_effective: fm.effective(),
            failed: fm.failed,
            unreliable: fm.unreliable(),
            in_window,
        });
    }
    if rows.iter().all(|r| r.n_effective == 0) {
        return Err(EstimateError::AllFailed(last_error.unwrap_or_else(|| "empty lambda grid".into())));
    }
    Ok(fit_rows(plan.base.bc, plan.t, plan.eps, dx, plan.window_limit, rows))
}

/// Selects the usable rows and fits the excitation index.
pub fn fit_rows(
    bc: BoundaryCondition,
    t: f64,
    eps: f64,
    dx: f64,
    window_limit: f64,
    rows: Vec<SweepRow>,
) -> SweepResult {
    let mut excluded = Vec::new();
    let mut samples = Vec::new();
    for r in &rows {
        let reason = if r.n_effective == 0 {
            Some("no finite replicas")
        } else if r.unreliable {
            Some("more than 1% non-finite replicas")
        } else if !r.in_window {
            Some("lambda^2*dx outside the continuum window")
        } else {
            None
        };
        match reason {
            Some(reason) => {
                excluded.push(RejectedPoint { parameter: r.lambda, log_value: r.log_energy, reason: reason.into() })
            }
            None => samples.push((r.lambda, r.log_energy)),
        }
    }
    let (fit, fit_window, fit_error) = match fit_excitation_index(&samples) {
        Ok(f) => {
            excluded.extend(f.rejected);
            (Some(f.fit), f.used, None)
        }
        Err(EstimateError::Fit { source, rejected }) => {
            excluded.extend(rejected);
            (None, Vec::new(), Some(format!("undefined ({source})")))
        }
        Err(e) => (None, Vec::new(), Some(e.to_string())),
    };
    SweepResult { bc, t, eps, dx, window_limit, rows, fit_window, excluded, fit, fit_error }
}
