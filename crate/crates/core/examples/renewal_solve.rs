//! Solves f = a + c∫f(s)(t-s)^{-1/2}ds numerically and compares with the
//! closed form, under grid refinement.

use spde_excite::{renewal_closed_form, solve_renewal, RenewalSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exact = renewal_closed_form(1.0, 1.0, 1.0)?;
    println!("closed form f(1) = {:.10}", exact.value);
    for n in [64, 256, 1024, 4096] {
        let sol = solve_renewal(&RenewalSpec::new(1.0, 1.0, 1.0, 1.0, n)?)?;
        println!("n = {n:>5}: f(1) = {:.10}, max rel. error {:.2e}", sol.values[n], sol.max_relative_deviation);
    }

    // Large coefficients stay finite in the log domain.
    let sol = solve_renewal(&RenewalSpec::new(1.0, 2.0, 1.0, 1.0, 4096)?)?;
    println!(
        "c = 2: log f(1) = {:.6} (closed form {:.6})",
        sol.log_values[4096],
        renewal_closed_form(1.0, 2.0, 1.0)?.log_value
    );
    Ok(())
}
