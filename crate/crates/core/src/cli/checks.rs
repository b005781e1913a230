//! Self-checks run by the `kernels-check`, `renewal` and `pam-validate` modes.

use super::config::ExperimentConfig;
use crate::estimators::{second_moment_field, with_workers, EstimateError};
use crate::kernels::{
    dirichlet_kernel, dirichlet_lower_factor, gaussian_kernel, half_bound_horizon, kernel, kernel_mass,
    neumann_gaussian_ratio_bound, neumann_kernel, InitialCondition, KernelError, KernelKind, KernelParams, Truncation,
};
use crate::quadrature;
use crate::renewal::{
    growth_exponent, pam_second_moment, renewal_closed_form, solve_renewal, RenewalError, RenewalSpec,
};
use crate::sim::{BoundaryCondition, NoiseCoefficient};
use crate::stats::geometric_grid;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Renewal(#[from] RenewalError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("quadrature did not converge: {0}")]
    Quadrature(#[from] quadrature::QuadratureError),
}

/// One named check: `worst` must not exceed `allowed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub allowed: f64,
    pub detail: Value,
}

impl Check {
    fn new(name: &str, worst: f64, allowed: f64, detail: Value) -> Self {
        Self { name: name.to_string(), passed: worst <= allowed, worst, allowed, detail }
    }
}

fn grid(length: f64, step: f64) -> Vec<f64> {
    let n = (1.0 / step).round().max(1.0) as usize;
    (0..=n).map(|i| length * i as f64 / n as f64).collect()
}

/// Ordering, lower bounds, semigroup identities, masses and the certified
/// Neumann/Gaussian constant on the configured grid.
pub fn kernel_checks(cfg: &ExperimentConfig) -> Result<Vec<Check>, CheckError> {
    let nu = cfg.kernel_nu;
    let length = cfg.length;
    let params = KernelParams::with_truncation(length, nu, Truncation::Tolerance(cfg.kernel_tol))?;
    let xs = grid(length, cfg.kernel_step);
    let eps = cfg.kernel_eps * length;
    let inner: Vec<f64> = xs.iter().copied().filter(|x| *x >= eps - 1e-12 && *x <= length - eps + 1e-12).collect();
    let mut checks = Vec::new();

    // 0 <= p_D <= p <= p_N
    let mut worst = f64::NEG_INFINITY;
    let mut allowed = 0.0f64;
    let mut at = (0.0, 0.0, 0.0);
    for &t in &cfg.kernel_times {
        let slack = params.truncation_bound_at(t) + 1e-12;
        allowed = allowed.max(slack);
        for &x in &xs {
            for &y in &xs {
                let pd = dirichlet_kernel(t, x, y, &params)?;
                let p = gaussian_kernel(t, x, y, nu)?;
                let pn = neumann_kernel(t, x, y, &params)?;
                let v = (pd - p).max(p - pn).max(-pd) - slack;
                if v > worst {
                    worst = v;
                    at = (t, x, y);
                }
            }
        }
    }
    checks.push(Check::new("kernel_ordering", worst, 0.0, json!({ "slack": allowed, "at": [at.0, at.1, at.2] })));

    // p_D >= (1 - 2e^{-eps^2/(nu t)}) p on [eps, L - eps]
    let t0 = half_bound_horizon(eps, nu);
    let mut times = cfg.kernel_times.clone();
    times.extend([t0, 0.5 * t0, 0.1 * t0]);
    let mut worst_factor = f64::NEG_INFINITY;
    let mut worst_half = f64::NEG_INFINITY;
    for &t in &times {
        let slack = params.truncation_bound_at(t) + 1e-12;
        let factor = dirichlet_lower_factor(t, eps, nu)?;
        for &x in &inner {
            for &y in &inner {
                let pd = dirichlet_kernel(t, x, y, &params)?;
                let p = gaussian_kernel(t, x, y, nu)?;
                worst_factor = worst_factor.max(factor * p - pd - slack);
                if t <= t0 * (1.0 + 1e-12) {
                    worst_half = worst_half.max(0.5 * p - pd - slack);
                }
            }
        }
    }
    checks.push(Check::new("dirichlet_lower_factor", worst_factor, 0.0, json!({ "eps": eps })));
    checks.push(Check::new("dirichlet_half_bound", worst_half, 0.0, json!({ "eps": eps, "horizon": t0 })));

    // Chapman-Kolmogorov and the on-diagonal identity
    let coarse: Vec<f64> = xs.iter().copied().step_by(2).collect();
    for kind in [KernelKind::Dirichlet, KernelKind::Neumann] {
        let mut worst_ck = 0.0f64;
        let mut worst_diag = 0.0f64;
        for pair in cfg.kernel_times.windows(2) {
            let (s, t) = (pair[0], pair[1]);
            for &x in &coarse {
                for &y in &coarse {
                    let lhs = quadrature::integrate(
                        |z| {
                            kernel(kind, s, x, z, &params).unwrap_or(0.0)
                                * kernel(kind, t, z, y, &params).unwrap_or(0.0)
                        },
                        0.0,
                        length,
                        &[x, y],
                        1e-11,
                    )?;
                    let rhs = kernel(kind, s + t, x, y, &params)?;
                    worst_ck = worst_ck.max((lhs - rhs).abs() / rhs.abs().max(1.0));
                }
            }
        }
        for &t in &cfg.kernel_times {
            for &x in &coarse {
                let lhs = quadrature::integrate(
                    |y| kernel(kind, t, x, y, &params).unwrap_or(0.0).powi(2),
                    0.0,
                    length,
                    &[x],
                    1e-11,
                )?;
                let rhs = kernel(kind, 2.0 * t, x, x, &params)?;
                worst_diag = worst_diag.max((lhs - rhs).abs() / rhs.abs().max(1.0));
            }
        }
        let tag = if kind == KernelKind::Dirichlet { "dirichlet" } else { "neumann" };
        checks.push(Check::new(&format!("{tag}_chapman_kolmogorov"), worst_ck, 1e-6, Value::Null));
        checks.push(Check::new(&format!("{tag}_on_diagonal"), worst_diag, 1e-6, Value::Null));
    }

    // masses
    let mut worst_n = 0.0f64;
    let mut worst_d = f64::NEG_INFINITY;
    for &t in &cfg.kernel_times {
        for &x in &xs {
            worst_n = worst_n.max((kernel_mass(KernelKind::Neumann, t, x, &params)? - 1.0).abs());
            let m = kernel_mass(KernelKind::Dirichlet, t, x, &params)?;
            worst_d = worst_d.max((m - 1.0).max(-m));
        }
    }
    checks.push(Check::new("neumann_mass", worst_n, 1e-8, Value::Null));
    checks.push(Check::new("dirichlet_mass_in_unit_interval", worst_d, 1e-10, Value::Null));

    let ratio = neumann_gaussian_ratio_bound(cfg.ratio_horizon, &params, 21)?;
    let ok = ratio.bound.is_finite() && ratio.bound >= 1.0;
    checks.push(Check {
        name: "neumann_gaussian_ratio".into(),
        passed: ok,
        worst: ratio.bound,
        allowed: f64::INFINITY,
        detail: serde_json::to_value(ratio).unwrap_or(Value::Null),
    });
    Ok(checks)
}

/// Solver accuracy against the closed form, and the growth exponent of the
/// closed form over the configured k window.
pub fn renewal_checks(cfg: &ExperimentConfig) -> Result<Vec<Check>, CheckError> {
    let spec = RenewalSpec::new(cfg.renewal_a, cfg.renewal_b, cfg.renewal_k, cfg.renewal_t, cfg.renewal_n)?;
    let sol = solve_renewal(&spec)?;
    let last = *sol.log_values.last().unwrap_or(&f64::NAN);
    let mut checks = vec![Check::new(
        "solver_vs_closed_form",
        sol.max_relative_deviation,
        1e-4,
        json!({ "steps": cfg.renewal_n, "log_f_T": last, "coefficient": spec.coefficient() }),
    )];

    let ks = geometric_grid(cfg.k_min, cfg.k_max, cfg.k_count);
    let samples = ks
        .iter()
        .map(|&k| Ok((k, renewal_closed_form(cfg.renewal_a, cfg.renewal_b * k, cfg.renewal_t)?.log_value)))
        .collect::<Result<Vec<_>, RenewalError>>()?;
    let fit = growth_exponent(&samples)?;
    checks.push(Check::new(
        "growth_exponent",
        (fit.fit.slope - 2.0).abs(),
        0.02,
        json!({ "slope": fit.fit.slope, "slope_se": fit.fit.slope_se, "k": ks }),
    ));
    Ok(checks)
}

/// Simulated `E|u_t(x)|²` of the flat Neumann model against the exact
/// whole-line moment, one check per λ.
pub fn pam_checks(cfg: &ExperimentConfig) -> Result<Vec<Check>, CheckError> {
    let mut checks = Vec::new();
    for &lambda in &cfg.pam_lambdas {
        let mut sim = cfg.sim_config(lambda);
        sim.bc = BoundaryCondition::Neumann;
        sim.u0 = InitialCondition::Flat { height: 1.0 };
        sim.sigma = NoiseCoefficient::Linear { c: 1.0 };
        let fm = with_workers(cfg.workers, || second_moment_field(&sim, cfg.t, cfg.replicas, cfg.seed))??;
        let j =
            fm.x.iter()
                .enumerate()
                .min_by(|a, b| (a.1 - cfg.pam_x).abs().total_cmp(&(b.1 - cfg.pam_x).abs()))
                .map(|(j, _)| j)
                .unwrap_or(0);
        let exact = pam_second_moment(lambda, cfg.t, cfg.nu)?.value;
        let (est, hw) = (fm.estimate[j], fm.half_width[j]);
        let err = (est - exact).abs();
        // Both criteria must hold; report the binding ratio.
        let worst = (err / (3.0 * hw).max(f64::MIN_POSITIVE)).max(err / (0.1 * exact));
        checks.push(Check::new(
            &format!("pam_lambda_{lambda}"),
            worst,
            1.0,
            json!({
                "lambda": lambda, "x": fm.x[j], "estimate": est, "half_width": hw,
                "exact": exact, "relative_error": err / exact, "replicas": fm.replicas, "failed": fm.failed,
            }),
        ));
    }
    Ok(checks)
}
