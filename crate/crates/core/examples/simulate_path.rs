//! One path of the Dirichlet problem with a bump, printed at a few times.

use spde_excite::{simulate_path, BoundaryCondition, InitialCondition, KernelParams, NoiseCoefficient, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t_end = 0.02;
    let cfg = SimConfig {
        params: KernelParams::new(1.0, 0.5)?,
        bc: BoundaryCondition::Dirichlet,
        sigma: NoiseCoefficient::SinePerturbed { c: 1.0, delta: 0.5 },
        u0: InitialCondition::Bump { center: 0.5, half_width: 0.2, height: 1.0 },
        nx: 63,
        dt: SimConfig::max_stable_dt_dividing(1.0, 63, 0.5, t_end),
        t_end,
        lambda: 3.0,
    };
    for w in cfg.validate()? {
        eprintln!("warning: {}", w.0);
    }
    let steps = cfg.steps_to(t_end)?;
    let times: Vec<f64> = (0..=4).map(|i| cfg.dt * (i * steps / 4) as f64).collect();
    for snap in simulate_path(&cfg, 42, &times)? {
        let row: Vec<String> = snap.values.iter().step_by(8).map(|v| format!("{v:7.3}")).collect();
        println!("t = {:.4}: {}", snap.time, row.join(" "));
    }
    Ok(())
}
