//! Tabulates the whole-line, Dirichlet and Neumann heat kernels on [0, 1].
//!
//! cargo run --example kernels_tabulate -- 0.01 0.5

use spde_excite::{
    dirichlet_kernel, gaussian_kernel, image_truncation_error, kernel_mass, neumann_kernel, KernelKind, KernelParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let t = args.first().copied().unwrap_or(0.01);
    let x = args.get(1).copied().unwrap_or(0.5);
    let params = KernelParams::new(1.0, 1.0)?;

    println!(
        "t = {t}, x = {x}, images = {}, tail bound = {:.2e}",
        params.images_at(t),
        image_truncation_error(t, &params, params.images_at(t))?
    );
    println!("{:>6} {:>14} {:>14} {:>14}", "y", "p", "p_D", "p_N");
    for k in 0..=20 {
        let y = 0.05 * k as f64;
        println!(
            "{y:>6.2} {:>14.8} {:>14.8} {:>14.8}",
            gaussian_kernel(t, x, y, 1.0)?,
            dirichlet_kernel(t, x, y, &params)?,
            neumann_kernel(t, x, y, &params)?
        );
    }
    println!(
        "mass: dirichlet {:.10}, neumann {:.10}",
        kernel_mass(KernelKind::Dirichlet, t, x, &params)?,
        kernel_mass(KernelKind::Neumann, t, x, &params)?
    );
    Ok(())
}
