//! The weakly singular renewal equation
//!
//! ```text
//! f(t) = a + c ∫₀ᵗ f(s) (t − s)^{−1/2} ds,      c = b·k,
//! ```
//!
//! solved by product integration and in closed form. Taking Laplace
//! transforms gives `F(s) = a / (√s (√s − c√π))`, whose inverse is the
//! resolvent
//!
//! ```text
//! f(t) = a · exp(c²πt) · erfc(−c√(πt)).
//! ```
//!
//! For large `k` this grows like `exp(πb²k²t)`, so `log log f(t) / log k → 2`.
//!
//! Everything is carried in the log domain; the solutions of interest
//! overflow `f64` long before the equation becomes hard.

use crate::special::ln_exp_sq_erfc_neg;
use crate::stats::{self, LogLogFit, RejectedPoint};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenewalError {
    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("at least 2 grid steps are required, got {0}")]
    TooFewSteps(usize),
    #[error("grid too coarse: c·(4/3)·√h = {0} must be below 1 for the implicit step")]
    GridTooCoarse(f64),
    #[error("growth exponent fit failed: {source}")]
    Fit { source: stats::FitError, rejected: Vec<RejectedPoint> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenewalSpec {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub horizon: f64,
    pub steps: usize,
}

impl RenewalSpec {
    pub fn new(a: f64, b: f64, k: f64, horizon: f64, steps: usize) -> Result<Self, RenewalError> {
        let spec = Self { a, b, k, horizon, steps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), RenewalError> {
        for (name, value) in [("a", self.a), ("b", self.b), ("k", self.k), ("horizon", self.horizon)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(RenewalError::NonPositive { name, value });
            }
        }
        if self.steps < 2 {
            return Err(RenewalError::TooFewSteps(self.steps));
        }
        Ok(())
    }

    /// The coefficient `c = b·k` in front of the integral.
    pub fn coefficient(&self) -> f64 {
        self.b * self.k
    }
}

/// Values of `f` on the uniform grid `t_i = i·T/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub times: Vec<f64>,
    /// `f(t_i)`; `+∞` where the value exceeds `f64` range.
    pub values: Vec<f64>,
    pub log_values: Vec<f64>,
    /// Largest relative deviation from [`renewal_closed_form`] over the grid.
    pub max_relative_deviation: f64,
}

/// `(value, ln value)` of a positive quantity that may overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogValue {
    pub value: f64,
    pub log_value: f64,
}

impl LogValue {
    fn from_log(log_value: f64) -> Self {
        Self { value: log_value.exp(), log_value }
    }
}

/// `a · exp(c²πt) · erfc(−c√(πt))`.
pub fn renewal_closed_form(a: f64, c: f64, t: f64) -> Result<LogValue, RenewalError> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(RenewalError::NonPositive { name: "a", value: a });
    }
    if !(c >= 0.0) || !c.is_finite() {
        return Err(RenewalError::NonPositive { name: "c", value: c });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(RenewalError::NonPositive { name: "t", value: t });
    }
    let z = c * (PI * t).sqrt();
    if z == 0.0 {
        return Ok(LogValue { value: a, log_value: a.ln() });
    }
    Ok(LogValue::from_log(a.ln() + ln_exp_sq_erfc_neg(z)))
}

/// Product-integration weights for `∫₀^{t_n} f(s)(t_n − s)^{−1/2} ds` with
/// piecewise-linear `f`, scaled by `1/√h`.
///
/// On the cell `[t_{n−m}, t_{n−m+1}]` the kernel moments are
/// `A_m = ∫_{m−1}^{m} τ^{−1/2} dτ` and `B_m = ∫_{m−1}^{m} (m − τ) τ^{−1/2} dτ`;
/// the left node receives `A_m − B_m` and the right node `B_m`.
/// The weights only depend on `n − j`; entry `d` of the returned vectors is
/// the weight of `f_{n−d}` for an interior node (`inner`) and for `f_0`
/// when `n = d` (`first`).
///
/// The solution behaves like `a + 2ac√t` near the origin, which linear
/// interpolation only captures to first order. `starting` holds correction
/// weights on nodes `0..=STARTING_NODES` that keep the rule exact for `1` and
/// `t` and make it exact for `t^{1/2}` and `t^{3/2}` as well.
struct ProductWeights {
    inner: Vec<f64>,
    first: Vec<f64>,
    starting: Vec<[f64; STARTING_NODES + 1]>,
}

const STARTING_NODES: usize = 3;

impl ProductWeights {
    fn new(steps: usize) -> Self {
        let a = |m: f64| 2.0 * (m.sqrt() - (m - 1.0).sqrt());
        let b = |m: f64| m * a(m) - 2.0 / 3.0 * (m.powf(1.5) - (m - 1.0).powf(1.5));
        let mut inner = vec![0.0; steps + 1];
        let mut first = vec![0.0; steps + 1];
        inner[0] = b(1.0);
        for d in 1..=steps {
            let m = d as f64;
            inner[d] = (a(m) - b(m)) + b(m + 1.0);
            first[d] = a(m) - b(m);
        }

        // ∫₀ⁿ s^β (n − s)^{−1/2} ds = n^{β+1/2} B(β + 1, 1/2).
        let exponents = [0.5, 1.5];
        let beta_fn = [PI / 2.0, 3.0 * PI / 8.0];
        let powers: Vec<[f64; 2]> = (0..=steps).map(|j| [(j as f64).sqrt(), (j as f64).powf(1.5)]).collect();
        let solve = starting_solver();
        let mut starting = vec![[0.0; STARTING_NODES + 1]; steps + 1];
        // Too few nodes for the correction to be defined; plain product integration.
        let corrected = if steps > STARTING_NODES { steps } else { 0 };
        for n in 1..=corrected {
            let mut defect = [0.0; 2];
            for (k, (&beta, &bf)) in exponents.iter().zip(&beta_fn).enumerate() {
                let approx: f64 = (1..=n).map(|j| inner[n - j] * powers[j][k]).sum();
                defect[k] = (n as f64).powf(beta + 0.5) * bf - approx;
            }
            starting[n] = solve(defect);
        }
        Self { inner, first, starting }
    }

    /// Full weight of node `j` at step `n`, including starting corrections.
    fn weight(&self, n: usize, j: usize) -> f64 {
        let base = if j == 0 { self.first[n] } else { self.inner[n - j] };
        base + if j <= STARTING_NODES { self.starting[n][j] } else { 0.0 }
    }
}

/// Returns the map from PI defects on `(t^{1/2}, t^{3/2})` to correction
/// weights `ω_0..ω_3` with `Σω_j = 0`, `Σω_j j = 0`, `Σω_j j^{1/2} = d_0`,
/// `Σω_j j^{3/2} = d_1`.
fn starting_solver() -> impl Fn([f64; 2]) -> [f64; STARTING_NODES + 1] {
    let nodes: Vec<f64> = (0..=STARTING_NODES).map(|j| j as f64).collect();
    let mut m = [[0.0; 4]; 4];
    for (c, &j) in nodes.iter().enumerate() {
        m[0][c] = 1.0;
        m[1][c] = j;
        m[2][c] = j.sqrt();
        m[3][c] = j.powf(1.5);
    }
    let inv = invert4(m);
    move |d| {
        let mut w = [0.0; STARTING_NODES + 1];
        for (r, wr) in w.iter_mut().enumerate() {
            *wr = inv[r][2] * d[0] + inv[r][3] * d[1];
        }
        w
    }
}

fn invert4(m: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut a = m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for k in 0..4 {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                for k in 0..4 {
                    a[r][k] -= f * a[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    inv
}

/// Solves the renewal equation with equality on the grid of `spec`.
///
/// The first `STARTING_NODES` values are coupled through the starting
/// weights and solved together as a small linear system; later steps march
/// forward in the log domain, rescaling by the running maximum.
pub fn solve_renewal(spec: &RenewalSpec) -> Result<GridFunction, RenewalError> {
    spec.validate()?;
    let n = spec.steps;
    let h = spec.horizon / n as f64;
    let sqrt_h = h.sqrt();
    let c = spec.coefficient();
    let w = ProductWeights::new(n);
    let ch = c * sqrt_h;
    let start = STARTING_NODES.min(n);
    for step in 1..=n {
        let diag = ch * w.weight(step, step);
        if diag >= 1.0 {
            return Err(RenewalError::GridTooCoarse(diag));
        }
    }

    // Starting block in units of a: g_i − ch Σ_j W_ij g_j = 1 (+ ch W_i0 for g_0 = 1).
    let mut log_f = Vec::with_capacity(n + 1);
    log_f.push(spec.a.ln());
    {
        let mut mat = [[0.0; 4]; 4];
        let mut rhs = [0.0; 4];
        for i in 1..=STARTING_NODES {
            let row = i - 1;
            mat[row][row] = 1.0;
            if i <= start {
                rhs[row] = 1.0 + ch * w.weight(i, 0);
                for j in 1..=STARTING_NODES {
                    let wij = if j <= i { w.weight(i, j) } else { w.starting[i][j] };
                    mat[row][j - 1] -= ch * wij;
                }
            }
        }
        mat[3][3] = 1.0;
        let inv = invert4(mat);
        for row in inv.iter().take(start) {
            let g: f64 = row.iter().zip(&rhs).map(|(m, r)| m * r).sum();
            log_f.push(spec.a.ln() + g.ln());
        }
    }

    let ln_a = spec.a.ln();
    for step in start + 1..=n {
        let scale = log_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (j, lf) in log_f.iter().enumerate() {
            sum += w.weight(step, j) * (lf - scale).exp();
        }
        let rhs = (ln_a - scale).exp() + ch * sum;
        let diag = ch * w.weight(step, step);
        log_f.push(scale + rhs.ln() - (1.0 - diag).ln());
    }

    let times: Vec<f64> = (0..=n).map(|i| spec.horizon * i as f64 / n as f64).collect();
    let mut max_dev = 0.0f64;
    for (t, lf) in times.iter().zip(&log_f) {
        let exact = renewal_closed_form(spec.a, c, *t)?.log_value;
        max_dev = max_dev.max((lf - exact).exp_m1().abs());
    }
    Ok(GridFunction {
        values: log_f.iter().map(|l| l.exp()).collect(),
        log_values: log_f,
        times,
        max_relative_deviation: max_dev,
    })
}

/// Least-squares slope of `log log f(t; k)` against `log k`.
pub fn growth_exponent(samples: &[(f64, f64)]) -> Result<LogLogFit, RenewalError> {
    stats::fit_log_log(samples).map_err(|(source, rejected)| RenewalError::Fit { source, rejected })
}

/// Exact `E|u_t(x)|²` for `∂ₜu = νΔu + λ u ẇ` on the whole line with `u₀ ≡ 1`.
///
/// The second moment solves `m(t) = 1 + λ² ∫₀ᵗ m(s) p(2(t − s), 0, 0) ds`
/// with `p(2τ, 0, 0) = (8πντ)^{−1/2}`, i.e. the renewal equation with
/// `a = 1` and `c = λ²/√(8πν)`:
/// `m(t) = exp(λ⁴t/(8ν)) · erfc(−λ²√(t/(8ν)))`.
pub fn pam_second_moment(lambda: f64, t: f64, diffusion: f64) -> Result<LogValue, RenewalError> {
    if !(lambda >= 0.0) {
        return Err(RenewalError::NonPositive { name: "lambda", value: lambda });
    }
    if !(t > 0.0) {
        return Err(RenewalError::NonPositive { name: "t", value: t });
    }
    if !(diffusion > 0.0) {
        return Err(RenewalError::NonPositive { name: "diffusion", value: diffusion });
    }
    renewal_closed_form(1.0, pam_coefficient(lambda, diffusion), t)
}

/// `λ²/√(8πν)`, the renewal coefficient of the flat whole-line model.
pub fn pam_coefficient(lambda: f64, diffusion: f64) -> f64 {
    lambda * lambda / (8.0 * PI * diffusion).sqrt()
}
