//! Lower bounds for the Dirichlet kernel and the Neumann/Gaussian ratio.

use spde_excite::kernels::{half_bound_horizon, neumann_gaussian_ratio_bound};
use spde_excite::{dirichlet_kernel, dirichlet_lower_factor, gaussian_kernel, KernelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = KernelParams::new(1.0, 1.0)?;
    let eps = 0.25;
    let t0 = half_bound_horizon(eps, 1.0);
    println!("eps = {eps}: factor >= 1/2 up to t0 = {t0:.6}");

    for t in [0.1 * t0, 0.5 * t0, t0, 2.0 * t0] {
        let factor = dirichlet_lower_factor(t, eps, 1.0)?;
        let (x, y) = (eps, 1.0 - eps);
        let ratio = dirichlet_kernel(t, x, y, &params)? / gaussian_kernel(t, x, y, 1.0)?;
        println!("t = {t:.5}  factor = {factor:.6}  p_D/p at (eps, L-eps) = {ratio:.6}");
    }

    for horizon in [0.1, 1.0, 10.0] {
        let r = neumann_gaussian_ratio_bound(horizon, &params, 21)?;
        println!(
            "T = {horizon:>4}: max p_N/p = {:.4} at t = {:.3e}, x = {:.2}, y = {:.2}",
            r.bound, r.at_t, r.at_x, r.at_y
        );
    }
    Ok(())
}
