//! Heat kernels on the line and on the interval `(0, L)`.
//!
//! The whole-line kernel is
//!
//! ```text
//! p(t, x, y) = exp(−(x − y)² / (4νt)) / √(4πνt)
//! ```
//!
//! and the interval kernels are its method-of-images sums:
//!
//! ```text
//! p_D(t, x, y) = Σₙ [ g(x − y − 2nL) − g(x + y − 2nL) ]     (killed at 0 and L)
//! p_N(t, x, y) = Σₙ [ g(x − y − 2nL) + g(x + y − 2nL) ]     (reflected at 0 and L)
//! ```
//!
//! with `g(d) = exp(−d² / (4νt)) / √(4πνt)`. With `ν = 1` these are the
//! kernels of `∂ₜ = Δ`; with `ν = ½` they generate `∂ₜ = ½Δ`.
//!
//! The series are truncated to `|n| ≤ N`, with `N` chosen so that the
//! rigorous tail bound of [`image_truncation_error`] stays below the
//! configured tolerance.

use crate::quadrature::{self, QuadratureError};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Smallest image count used by the adaptive truncation policy.
pub const MIN_IMAGES: usize = 3;
/// Default absolute truncation tolerance.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;
const MAX_IMAGES: usize = 1 << 20;
/// Relative slack when deciding whether a point lies on `[0, L]`.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("diffusion coefficient must be positive, got {0}")]
    NonPositiveDiffusion(f64),
    #[error("interval length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("image count must be at least 1")]
    ZeroImages,
    #[error("truncation tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("point {value} lies outside [0, {length}]")]
    OutOfDomain { value: f64, length: f64 },
    #[error("invalid initial condition: {0}")]
    InitialCondition(String),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// How many images of the interval are summed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Truncation {
    /// Exactly `|n| ≤ N`.
    Fixed(usize),
    /// Smallest `N ≥ MIN_IMAGES` whose tail bound is at most this value.
    Tolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    length: f64,
    diffusion: f64,
    truncation: Truncation,
}

impl KernelParams {
    pub fn new(length: f64, diffusion: f64) -> Result<Self, KernelError> {
        Self::with_truncation(length, diffusion, Truncation::Tolerance(DEFAULT_TRUNCATION_TOL))
    }

    pub fn with_truncation(length: f64, diffusion: f64, truncation: Truncation) -> Result<Self, KernelError> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(KernelError::NonPositiveLength(length));
        }
        if !(diffusion > 0.0) || !diffusion.is_finite() {
            return Err(KernelError::NonPositiveDiffusion(diffusion));
        }
        match truncation {
            Truncation::Fixed(0) => return Err(KernelError::ZeroImages),
            Truncation::Tolerance(tol) if !(tol > 0.0) => return Err(KernelError::NonPositiveTolerance(tol)),
            _ => {}
        }
        Ok(Self { length, diffusion, truncation })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Image count used at time `t`.
    pub fn images_at(&self, t: f64) -> usize {
        match self.truncation {
            Truncation::Fixed(n) => n,
            Truncation::Tolerance(tol) => {
                let mut n = MIN_IMAGES;
                while n < MAX_IMAGES && tail_bound(t, self.length, self.diffusion, n) > tol {
                    n = if n < 64 { n + 1 } else { n * 2 };
                }
                n
            }
        }
    }

    /// Truncation bound actually achieved at time `t`.
    pub fn truncation_bound_at(&self, t: f64) -> f64 {
        tail_bound(t, self.length, self.diffusion, self.images_at(t))
    }

    fn check_point(&self, v: f64) -> Result<f64, KernelError> {
        let slack = DOMAIN_SLACK * self.length;
        if v.is_nan() || v < -slack || v > self.length + slack {
            return Err(KernelError::OutOfDomain { value: v, length: self.length });
        }
        Ok(v.clamp(0.0, self.length))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum KernelKind {
    /// Whole line; the interval is only used as an integration range.
    Gaussian,
    Dirichlet,
    Neumann,
}

/// Nonnegative, bounded initial data on `[0, L]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InitialCondition {
    /// `height · cos²(π(x − center) / (2·half_width))` on `|x − center| < half_width`, zero elsewhere.
    Bump {
        center: f64,
        half_width: f64,
        height: f64,
    },
    Flat {
        height: f64,
    },
    /// Piecewise-linear interpolation of `(nodes, values)`; zero outside the node range.
    Table {
        nodes: Vec<f64>,
        values: Vec<f64>,
    },
}

impl InitialCondition {
    pub fn validate(&self, length: f64) -> Result<(), KernelError> {
        let bad = |m: &str| Err(KernelError::InitialCondition(m.to_string()));
        match self {
            Self::Bump { center, half_width, height } => {
                if !(*half_width > 0.0) || !(*height >= 0.0) || !height.is_finite() {
                    return bad("bump needs positive half-width and finite nonnegative height");
                }
                if !(center - half_width > 0.0 && center + half_width < length) {
                    return bad("bump support must lie strictly inside (0, L)");
                }
            }
            Self::Flat { height } => {
                if !(*height >= 0.0) || !height.is_finite() {
                    return bad("flat height must be finite and nonnegative");
                }
            }
            Self::Table { nodes, values } => {
                if nodes.len() < 2 || nodes.len() != values.len() {
                    return bad("table needs at least two nodes and one value per node");
                }
                if nodes.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("table nodes must be strictly increasing");
                }
                if nodes[0] < 0.0 || nodes[nodes.len() - 1] > length {
                    return bad("table nodes must lie in [0, L]");
                }
                if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return bad("table values must be finite and nonnegative");
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Bump { center, half_width, height } => {
                let d = (x - center) / half_width;
                if d.abs() >= 1.0 {
                    0.0
                } else {
                    height * (0.5 * PI * d).cos().powi(2)
                }
            }
            Self::Flat { height } => *height,
            Self::Table { nodes, values } => {
                if x < nodes[0] || x > nodes[nodes.len() - 1] {
                    return 0.0;
                }
                let i = nodes.partition_point(|&n| n <= x).clamp(1, nodes.len() - 1);
                let (x0, x1) = (nodes[i - 1], nodes[i]);
                let w = (x - x0) / (x1 - x0);
                values[i - 1] * (1.0 - w) + values[i] * w
            }
        }
    }

    /// Points where the data is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Bump { center, half_width, .. } => vec![center - half_width, *center, center + half_width],
            Self::Flat { .. } => Vec::new(),
            Self::Table { nodes, .. } => nodes.clone(),
        }
    }

    /// Support as a closed interval clipped to `[0, length]`.
    pub fn support(&self, length: f64) -> (f64, f64) {
        match self {
            Self::Bump { center, half_width, .. } => {
                ((center - half_width).max(0.0), (center + half_width).min(length))
            }
            Self::Flat { .. } => (0.0, length),
            Self::Table { nodes, .. } => (nodes[0].max(0.0), nodes[nodes.len() - 1].min(length)),
        }
    }
}

fn check_time(t: f64) -> Result<(), KernelError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(KernelError::NonPositiveTime(t));
    }
    Ok(())
}

/// Rigorous bound on the absolute tail of either image series beyond `|n| > images`.
///
/// For `x, y ∈ [0, L]` and `|n| ≥ m + 1`, both `|x − y − 2nL|` and
/// `|x + y − 2nL|` are at least `2mL`. The four tails (two signs of `n`,
/// two image families) are therefore dominated by
/// `4/√(4πνt) · Σ_{m ≥ N} exp(−m²L²/(νt))`, and the geometric comparison
/// `m² ≥ N² + 2N(m − N)` sums that in closed form.
fn tail_bound(t: f64, length: f64, diffusion: f64, images: usize) -> f64 {
    let a = length * length / (diffusion * t);
    let n = images as f64;
    let head = (-n * n * a).exp();
    let ratio = (-2.0 * n * a).exp();
    4.0 / (4.0 * PI * diffusion * t).sqrt() * head / (1.0 - ratio)
}

pub fn image_truncation_error(t: f64, params: &KernelParams, images: usize) -> Result<f64, KernelError> {
    check_time(t)?;
    if images == 0 {
        return Err(KernelError::ZeroImages);
    }
    Ok(tail_bound(t, params.length, params.diffusion, images))
}

#[inline]
fn gaussian_unchecked(t: f64, d: f64, diffusion: f64) -> f64 {
    let four_nu_t = 4.0 * diffusion * t;
    (-d * d / four_nu_t).exp() / (PI * four_nu_t).sqrt()
}

pub fn gaussian_kernel(t: f64, x: f64, y: f64, diffusion: f64) -> Result<f64, KernelError> {
    check_time(t)?;
    if !(diffusion > 0.0) {
        return Err(KernelError::NonPositiveDiffusion(diffusion));
    }
    Ok(gaussian_unchecked(t, x - y, diffusion))
}

/// Sign of the reflected image family: `−1` kills at the walls, `+1` reflects.
fn image_sum(t: f64, x: f64, y: f64, params: &KernelParams, reflected_sign: f64) -> f64 {
    let n_max = params.images_at(t) as i64;
    let two_l = 2.0 * params.length;
    let four_nu_t = 4.0 * params.diffusion * t;
    let mut direct = 0.0;
    let mut reflected = 0.0;
    // Sum from the outermost images inward so the dominant terms are added last.
    for n in (0..=n_max).rev() {
        let shift = two_l * n as f64;
        let e = |d: f64| (-d * d / four_nu_t).exp();
        if n == 0 {
            direct += e(x - y);
            reflected += e(x + y);
        } else {
            direct += e(x - y - shift) + e(x - y + shift);
            reflected += e(x + y - shift) + e(x + y + shift);
        }
    }
    (direct + reflected_sign * reflected) / (PI * four_nu_t).sqrt()
}

pub(crate) fn dirichlet_unchecked(t: f64, x: f64, y: f64, params: &KernelParams) -> f64 {
    image_sum(t, x, y, params, -1.0)
}

pub(crate) fn neumann_unchecked(t: f64, x: f64, y: f64, params: &KernelParams) -> f64 {
    image_sum(t, x, y, params, 1.0)
}

pub fn dirichlet_kernel(t: f64, x: f64, y: f64, params: &KernelParams) -> Result<f64, KernelError> {
    check_time(t)?;
    let (x, y) = (params.check_point(x)?, params.check_point(y)?);
    if x == 0.0 || y == 0.0 || x == params.length || y == params.length {
        return Ok(0.0);
    }
    Ok(dirichlet_unchecked(t, x, y, params))
}

pub fn neumann_kernel(t: f64, x: f64, y: f64, params: &KernelParams) -> Result<f64, KernelError> {
    check_time(t)?;
    let (x, y) = (params.check_point(x)?, params.check_point(y)?);
    Ok(neumann_unchecked(t, x, y, params))
}

/// Evaluates the kernel of the given kind.
pub fn kernel(kind: KernelKind, t: f64, x: f64, y: f64, params: &KernelParams) -> Result<f64, KernelError> {
    match kind {
        KernelKind::Gaussian => gaussian_kernel(t, x, y, params.diffusion),
        KernelKind::Dirichlet => dirichlet_kernel(t, x, y, params),
        KernelKind::Neumann => neumann_kernel(t, x, y, params),
    }
}

/// `1 − 2·exp(−ε²/(νt))`: the factor by which the Dirichlet kernel is at
/// least a fraction of the Gaussian one when `x, y` are `ε` away from both
/// walls. May be negative, in which case the bound is vacuous.
pub fn dirichlet_lower_factor(t: f64, eps: f64, diffusion: f64) -> Result<f64, KernelError> {
    check_time(t)?;
    if !(eps > 0.0) {
        return Err(KernelError::NonPositiveEpsilon(eps));
    }
    if !(diffusion > 0.0) {
        return Err(KernelError::NonPositiveDiffusion(diffusion));
    }
    Ok(1.0 - 2.0 * (-eps * eps / (diffusion * t)).exp())
}

/// Time up to which [`dirichlet_lower_factor`] stays at least one half.
pub fn half_bound_horizon(eps: f64, diffusion: f64) -> f64 {
    eps * eps / (diffusion * 4f64.ln())
}

/// `∫₀ᴸ kernel(t, x, y) dy`.
pub fn kernel_mass(kind: KernelKind, t: f64, x: f64, params: &KernelParams) -> Result<f64, KernelError> {
    check_time(t)?;
    let x = params.check_point(x)?;
    let p = *params;
    let breaks = [x];
    let tol = quadrature::DEFAULT_TOLERANCE * 1e-2;
    let v = match kind {
        KernelKind::Gaussian => {
            quadrature::integrate(|y| gaussian_unchecked(t, x - y, p.diffusion), 0.0, p.length, &breaks, tol)?
        }
        KernelKind::Dirichlet => {
            quadrature::integrate(|y| dirichlet_unchecked(t, x, y, &p), 0.0, p.length, &breaks, tol)?
        }
        KernelKind::Neumann => quadrature::integrate(|y| neumann_unchecked(t, x, y, &p), 0.0, p.length, &breaks, tol)?,
    };
    Ok(v)
}

/// `(G u₀)_t(x) = ∫₀ᴸ u₀(y)·kernel(t, x, y) dy` at every grid point.
pub fn semigroup_apply(
    kind: KernelKind,
    u0: &InitialCondition,
    t: f64,
    params: &KernelParams,
    grid: &[f64],
) -> Result<Vec<f64>, KernelError> {
    check_time(t)?;
    u0.validate(params.length)?;
    let (lo, hi) = u0.support(params.length);
    let mut breaks = u0.breakpoints();
    grid.iter()
        .map(|&x| {
            let x = params.check_point(x)?;
            if kind == KernelKind::Dirichlet && (x == 0.0 || x == params.length) {
                return Ok(0.0);
            }
            breaks.push(x);
            let k = |y: f64| match kind {
                KernelKind::Gaussian => gaussian_unchecked(t, x - y, params.diffusion),
                KernelKind::Dirichlet => dirichlet_unchecked(t, x, y, params),
                KernelKind::Neumann => neumann_unchecked(t, x, y, params),
            };
            let v = quadrature::integrate(|y| u0.value(y) * k(y), lo, hi, &breaks, quadrature::DEFAULT_TOLERANCE);
            breaks.pop();
            Ok(v?.max(0.0))
        })
        .collect()
}

/// Largest observed ratio `p_N / p` over `t` in a geometric grid up to
/// `horizon` and `x, y` on a uniform grid of `points` nodes over `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioBound {
    pub horizon: f64,
    pub bound: f64,
    pub at_t: f64,
    pub at_x: f64,
    pub at_y: f64,
}

pub fn neumann_gaussian_ratio_bound(
    horizon: f64,
    params: &KernelParams,
    points: usize,
) -> Result<RatioBound, KernelError> {
    check_time(horizon)?;
    let points = points.max(2);
    let times = crate::stats::geometric_grid(horizon * 1e-4, horizon, 41);
    let mut best = RatioBound { horizon, bound: 0.0, at_t: horizon, at_x: 0.0, at_y: 0.0 };
    for &t in &times {
        for i in 0..points {
            let x = params.length * i as f64 / (points - 1) as f64;
            for j in 0..points {
                let y = params.length * j as f64 / (points - 1) as f64;
                let g = gaussian_unchecked(t, x - y, params.diffusion);
                if g < f64::MIN_POSITIVE {
                    continue;
                }
                let r = neumann_unchecked(t, x, y, params) / g;
                if r > best.bound {
                    best = RatioBound { horizon, bound: r, at_t: t, at_x: x, at_y: y };
                }
            }
        }
    }
    Ok(best)
}
