//! A small λ-sweep with the excitation-index fit.
//!
//! cargo run --release --example energy_sweep -- neumann

use spde_excite::stats::geometric_grid;
use spde_excite::{
    energy_sweep, BoundaryCondition, InitialCondition, KernelParams, NoiseCoefficient, SimConfig, SweepPlan,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (bc, u0) = match std::env::args().nth(1).as_deref() {
        Some("neumann") => (BoundaryCondition::Neumann, InitialCondition::Flat { height: 1.0 }),
        _ => (BoundaryCondition::Dirichlet, InitialCondition::Bump { center: 0.5, half_width: 0.2, height: 1.0 }),
    };
    let (t, nx) = (0.02, 127);
    let plan = SweepPlan {
        base: SimConfig {
            params: KernelParams::new(1.0, 0.5)?,
            bc,
            sigma: NoiseCoefficient::Linear { c: 1.0 },
            u0,
            nx,
            dt: SimConfig::max_stable_dt_dividing(1.0, nx, 0.5, t),
            t_end: t,
            lambda: 1.0,
        },
        lambdas: geometric_grid(2.0, 5.0, 5),
        t,
        replicas: 500,
        master_seed: 1,
        eps: 0.25,
        window_limit: 0.2,
    };
    let result = energy_sweep(&plan)?;
    for r in &result.rows {
        println!(
            "lambda {:.3}: log E = {:9.4} +/- {:.4}  S = {:.4e}  in window: {}",
            r.lambda, r.log_energy, r.log_energy_ci, r.sup, r.in_window
        );
    }
    match result.fit {
        Some(f) => println!("slope {:.3} +/- {:.3}", f.slope, 1.96 * f.slope_se),
        None => println!("slope {}", result.fit_error.unwrap_or_default()),
    }
    Ok(())
}
