//! Monte Carlo E|u_t(1/2)|² for the flat Neumann problem against the exact
//! whole-line moment.
//!
//! cargo run --release --example pam_moment -- 2000

use spde_excite::{
    pam_second_moment, second_moment_field, BoundaryCondition, InitialCondition, KernelParams, NoiseCoefficient,
    SimConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let replicas: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let t = 0.05;
    for lambda in [0.5, 1.0, 2.0] {
        let cfg = SimConfig {
            params: KernelParams::new(1.0, 0.5)?,
            bc: BoundaryCondition::Neumann,
            sigma: NoiseCoefficient::Linear { c: 1.0 },
            u0: InitialCondition::Flat { height: 1.0 },
            nx: 127,
            dt: SimConfig::max_stable_dt_dividing(1.0, 127, 0.5, t),
            t_end: t,
            lambda,
        };
        let fm = second_moment_field(&cfg, t, replicas, 7)?;
        let j = fm.x.len() / 2;
        let exact = pam_second_moment(lambda, t, 0.5)?.value;
        println!("lambda {lambda}: {:.5} +/- {:.5}, exact {exact:.5}", fm.estimate[j], fm.half_width[j]);
    }
    Ok(())
}
