//! Finite-difference Euler–Maruyama simulation of
//!
//! ```text
//! ∂ₜu = νΔu + λ σ(u) ẇ      on (0, L)
//! ```
//!
//! with Dirichlet (`u = 0`) or Neumann (`∂ₓu = 0`) walls, driven by
//! space-time white noise.
//!
//! The grid has `nx` interior nodes and two wall nodes, `dx = L/(nx + 1)`.
//! One step is
//!
//! ```text
//! u_j ← u_j + r (u_{j+1} − 2u_j + u_{j−1}) + λ σ(u_j) ξ_j,    r = ν dt/dx²,
//! ```
//!
//! where `ξ_j ~ N(0, dt/dx)` is the white-noise mass of a `dt × dx` cell
//! divided by the cell width. Dirichlet wall nodes are pinned to zero.
//! Neumann wall nodes use the ghost reflection `u_{−1} = u_1`; they own
//! half a cell, so their noise variance is `2dt/dx` and the discrete mass
//! `Σ wⱼ uⱼ dx` with trapezoid weights is conserved exactly by the
//! diffusion part.

use crate::kernels::{InitialCondition, KernelError, KernelParams};
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Generator used for every simulated path.
pub type PathRng = Xoshiro256PlusPlus;

/// Largest admissible `ν dt/dx²`.
pub const CFL_LIMIT: f64 = 0.25;
/// `λ²·dx` above which the grid no longer resolves the noise-driven correlation length.
pub const CONTINUUM_WINDOW: f64 = 0.2;
/// Steps between finiteness checks; a non-finite value never becomes finite again.
const CHECK_EVERY: usize = 64;
const TIME_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("need at least one interior node")]
    NoInteriorNodes,
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("horizon t_end = {t_end} is shorter than dt = {dt}")]
    HorizonTooShort { t_end: f64, dt: f64 },
    #[error("noise level must be nonnegative, got {0}")]
    NegativeLambda(f64),
    #[error(
        "CFL violated: nu*dt/dx^2 = {ratio} exceeds {limit} (dt = {dt}, nx = {nx}, dx = {dx}); need dt <= {max_dt}"
    )]
    Cfl { ratio: f64, limit: f64, dt: f64, nx: usize, dx: f64, max_dt: f64 },
    #[error("invalid noise coefficient: {0}")]
    Noise(String),
    #[error("time {time} is not in [0, {t_end}] or not a multiple of dt = {dt}")]
    BadOutputTime { time: f64, t_end: f64, dt: f64 },
    #[error("state has {expected} nodes, got {got}")]
    StateLength { expected: usize, got: usize },
    #[error("non-finite value in the field at t = {time} (node {node})")]
    NonFinite { time: f64, node: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
        })
    }
}

/// The nonlinearity `σ`, always with `σ(0) = 0` and
/// `l_σ ≤ |σ(u)/u| ≤ L_σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NoiseCoefficient {
    /// `σ(u) = c·u`.
    Linear { c: f64 },
    /// `σ(u) = c·u·(1 + δ·sin u)` with `0 ≤ δ < 1`.
    SinePerturbed { c: f64, delta: f64 },
}

impl NoiseCoefficient {
    pub fn validate(&self) -> Result<(), SimError> {
        match *self {
            Self::Linear { c } if c > 0.0 && c.is_finite() => Ok(()),
            Self::SinePerturbed { c, delta } if c > 0.0 && c.is_finite() && (0.0..1.0).contains(&delta) => Ok(()),
            other => Err(SimError::Noise(format!("{other:?}: need c > 0 and 0 <= delta < 1"))),
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Self::Linear { c } => c * u,
            Self::SinePerturbed { c, delta } => c * u * (1.0 + delta * u.sin()),
        }
    }

    /// `l_σ = inf |σ(u)/u|`.
    pub fn lower(&self) -> f64 {
        match *self {
            Self::Linear { c } => c,
            Self::SinePerturbed { c, delta } => c * (1.0 - delta),
        }
    }

    /// `L_σ = sup |σ(u)/u|`.
    pub fn upper(&self) -> f64 {
        match *self {
            Self::Linear { c } => c,
            Self::SinePerturbed { c, delta } => c * (1.0 + delta),
        }
    }
}

/// A configuration problem that does not prevent simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning(pub String);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub params: KernelParams,
    pub bc: BoundaryCondition,
    pub sigma: NoiseCoefficient,
    pub u0: InitialCondition,
    pub nx: usize,
    pub dt: f64,
    pub t_end: f64,
    pub lambda: f64,
}

impl SimConfig {
    pub fn dx(&self) -> f64 {
        self.params.length() / (self.nx + 1) as f64
    }

    pub fn node_count(&self) -> usize {
        self.nx + 2
    }

    pub fn node_positions(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.node_count()).map(|j| if j == self.nx + 1 { self.params.length() } else { j as f64 * dx }).collect()
    }

    pub fn cfl_ratio(&self) -> f64 {
        self.params.diffusion() * self.dt / (self.dx() * self.dx())
    }

    /// Largest `dt` with `ν dt/dx² ≤ CFL_LIMIT`.
    pub fn max_stable_dt(length: f64, nx: usize, diffusion: f64) -> f64 {
        let dx = length / (nx + 1) as f64;
        CFL_LIMIT * dx * dx / diffusion
    }

    /// Largest stable `dt` that divides `t` into a whole number of steps.
    pub fn max_stable_dt_dividing(length: f64, nx: usize, diffusion: f64, t: f64) -> f64 {
        let cap = Self::max_stable_dt(length, nx, diffusion);
        let steps = (t / cap * (1.0 - 1e-12)).ceil().max(1.0);
        t / steps
    }

    /// Checks every invariant; returns warnings for the ones that only degrade results.
    pub fn validate(&self) -> Result<Vec<Warning>, SimError> {
        if self.nx == 0 {
            return Err(SimError::NoInteriorNodes);
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SimError::NonPositiveStep(self.dt));
        }
        if !(self.t_end >= self.dt * (1.0 - TIME_SLACK)) {
            return Err(SimError::HorizonTooShort { t_end: self.t_end, dt: self.dt });
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(SimError::NegativeLambda(self.lambda));
        }
        let ratio = self.cfl_ratio();
        if ratio > CFL_LIMIT * (1.0 + 1e-12) {
            return Err(SimError::Cfl {
                ratio,
                limit: CFL_LIMIT,
                dt: self.dt,
                nx: self.nx,
                dx: self.dx(),
                max_dt: Self::max_stable_dt(self.params.length(), self.nx, self.params.diffusion()),
            });
        }
        self.sigma.validate()?;
        self.u0.validate(self.params.length())?;
        let mut warnings = Vec::new();
        let window = self.lambda * self.lambda * self.dx();
        if window > CONTINUUM_WINDOW {
            warnings.push(Warning(format!(
                "lambda^2*dx = {window:.3} exceeds {CONTINUUM_WINDOW}: grid does not resolve the noise correlation length at lambda = {}",
                self.lambda
            )));
        }
        Ok(warnings)
    }

    /// Number of steps to reach `t`, if `t` is a multiple of `dt` inside `[0, t_end]`.
    pub fn steps_to(&self, t: f64) -> Result<usize, SimError> {
        let bad = || SimError::BadOutputTime { time: t, t_end: self.t_end, dt: self.dt };
        if !(t >= 0.0) || t > self.t_end * (1.0 + TIME_SLACK) {
            return Err(bad());
        }
        let q = t / self.dt;
        let n = q.round();
        if (q - n).abs() > TIME_SLACK * q.max(1.0) {
            return Err(bad());
        }
        Ok(n as usize)
    }

    /// Initial field on the grid; Dirichlet walls are zero.
    pub fn initial_field(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.node_positions().iter().map(|&x| self.u0.value(x)).collect();
        if self.bc == BoundaryCondition::Dirichlet {
            values[0] = 0.0;
            values[self.nx + 1] = 0.0;
        }
        values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSnapshot {
    pub time: f64,
    /// `nx + 2` values including both wall nodes.
    pub values: Vec<f64>,
}

/// `n` independent `N(0, dt/dx)` draws.
pub fn noise_increments<R: Rng + ?Sized>(rng: &mut R, n: usize, dt: f64, dx: f64) -> Vec<f64> {
    let sd = (dt / dx).sqrt();
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        })
        .collect()
}

/// Injective in `index` for every fixed `master`: an odd multiplier and an
/// addition are bijections of `u64`, and so is the SplitMix64 finalizer.
pub fn derive_replica_seed(master: u64, index: u64) -> u64 {
    splitmix_finalize(splitmix_finalize(master).wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn path_rng(seed: u64) -> PathRng {
    PathRng::seed_from_u64(seed)
}

/// Reusable buffers and precomputed constants for advancing one path.
pub struct Integrator<'a> {
    cfg: &'a SimConfig,
    r: f64,
    noise_sd: f64,
    scratch: Vec<f64>,
}

impl<'a> Integrator<'a> {
    pub fn new(cfg: &'a SimConfig) -> Self {
        let dx = cfg.dx();
        Self { cfg, r: cfg.cfl_ratio(), noise_sd: (cfg.dt / dx).sqrt(), scratch: vec![0.0; cfg.node_count()] }
    }

    /// Advances `field` (at time `t0`) by `steps` steps in place.
    pub fn advance(&mut self, field: &mut Vec<f64>, t0: f64, steps: usize, rng: &mut PathRng) -> Result<(), SimError> {
        let expected = self.cfg.node_count();
        if field.len() != expected {
            return Err(SimError::StateLength { expected, got: field.len() });
        }
        let mut done = 0;
        while done < steps {
            let chunk = CHECK_EVERY.min(steps - done);
            match self.cfg.sigma {
                NoiseCoefficient::Linear { c } => self.run(field, chunk, rng, |u| c * u),
                s @ NoiseCoefficient::SinePerturbed { .. } => self.run(field, chunk, rng, |u| s.eval(u)),
            }
            done += chunk;
            if let Some(node) = field.iter().position(|v| !v.is_finite()) {
                return Err(SimError::NonFinite { time: t0 + done as f64 * self.cfg.dt, node });
            }
        }
        Ok(())
    }

    fn run<F: Fn(f64) -> f64>(&mut self, field: &mut Vec<f64>, steps: usize, rng: &mut PathRng, sigma: F) {
        let n = field.len();
        let r = self.r;
        let amp = self.cfg.lambda * self.noise_sd;
        let neumann = self.cfg.bc == BoundaryCondition::Neumann;
        let wall_amp = amp * std::f64::consts::SQRT_2;
        let noisy = amp != 0.0;
        for _ in 0..steps {
            let u = &field[..];
            let v = &mut self.scratch[..];
            if neumann {
                let xi = if noisy { normal(rng) } else { 0.0 };
                v[0] = u[0] + 2.0 * r * (u[1] - u[0]) + wall_amp * sigma(u[0]) * xi;
            } else {
                v[0] = 0.0;
            }
            if noisy {
                for j in 1..n - 1 {
                    let xi = normal(rng);
                    v[j] = u[j] + r * (u[j + 1] - 2.0 * u[j] + u[j - 1]) + amp * sigma(u[j]) * xi;
                }
            } else {
                for j in 1..n - 1 {
                    v[j] = u[j] + r * (u[j + 1] - 2.0 * u[j] + u[j - 1]);
                }
            }
            if neumann {
                let xi = if noisy { normal(rng) } else { 0.0 };
                v[n - 1] = u[n - 1] + 2.0 * r * (u[n - 2] - u[n - 1]) + wall_amp * sigma(u[n - 1]) * xi;
            } else {
                v[n - 1] = 0.0;
            }
            std::mem::swap(field, &mut self.scratch);
        }
    }
}

#[inline(always)]
fn normal(rng: &mut PathRng) -> f64 {
    StandardNormal.sample(rng)
}

/// One Euler–Maruyama step from `state`.
pub fn step(state: &FieldSnapshot, cfg: &SimConfig, rng: &mut PathRng) -> Result<FieldSnapshot, SimError> {
    cfg.validate()?;
    let mut values = state.values.clone();
    Integrator::new(cfg).advance(&mut values, state.time, 1, rng)?;
    Ok(FieldSnapshot { time: state.time + cfg.dt, values })
}

/// Simulates one path and returns the field at each requested time, in time order.
pub fn simulate_path(cfg: &SimConfig, seed: u64, output_times: &[f64]) -> Result<Vec<FieldSnapshot>, SimError> {
    cfg.validate()?;
    let mut targets: Vec<(usize, f64)> =
        output_times.iter().map(|&t| cfg.steps_to(t).map(|n| (n, t))).collect::<Result<_, _>>()?;
    targets.sort_by_key(|a| a.0);
    let mut rng = path_rng(seed);
    let mut field = cfg.initial_field();
    let mut integrator = Integrator::new(cfg);
    let mut at = 0;
    let mut out = Vec::with_capacity(targets.len());
    for (n, t) in targets {
        integrator.advance(&mut field, at as f64 * cfg.dt, n - at, &mut rng)?;
        at = n;
        out.push(FieldSnapshot { time: t, values: field.clone() });
    }
    Ok(out)
}

/// Field at step count `steps` for replica `seed`, reusing caller buffers.
pub(crate) fn terminal_field(
    integrator: &mut Integrator<'_>,
    cfg: &SimConfig,
    seed: u64,
    steps: usize,
    field: &mut Vec<f64>,
) -> Result<(), SimError> {
    field.clear();
    field.extend(cfg.initial_field());
    let mut rng = path_rng(seed);
    integrator.advance(field, 0.0, steps, &mut rng)
}
