//! Heat flow of a bump under both boundary conditions.

use spde_excite::{semigroup_apply, InitialCondition, KernelKind, KernelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = KernelParams::new(1.0, 0.5)?;
    let u0 = InitialCondition::Bump { center: 0.3, half_width: 0.2, height: 1.0 };
    let grid: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    for t in [0.01, 0.05, 0.2] {
        let d = semigroup_apply(KernelKind::Dirichlet, &u0, t, &params, &grid)?;
        let n = semigroup_apply(KernelKind::Neumann, &u0, t, &params, &grid)?;
        println!("t = {t}");
        for ((x, a), b) in grid.iter().zip(&d).zip(&n) {
            println!("  {x:.1}  {a:.6}  {b:.6}");
        }
    }
    Ok(())
}
