//! Growth exponent of log f(t; k) in k: tends to 2.

use spde_excite::stats::geometric_grid;
use spde_excite::{growth_exponent, renewal_closed_form};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (lo, hi) in [(1.0, 10.0), (10.0, 100.0), (1e2, 1e4)] {
        let samples = geometric_grid(lo, hi, 9)
            .into_iter()
            .map(|k| Ok((k, renewal_closed_form(1.0, k, 1.0)?.log_value)))
            .collect::<Result<Vec<_>, spde_excite::RenewalError>>()?;
        let fit = growth_exponent(&samples)?;
        println!("k in [{lo:>5}, {hi:>6}]: slope {:.5} +/- {:.1e}", fit.fit.slope, fit.fit.slope_se);
    }
    Ok(())
}
