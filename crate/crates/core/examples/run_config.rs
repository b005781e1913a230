//! Runs a configuration file through the library entry points.
//!
//! cargo run --release --example run_config -- configs/renewal.cfg

use spde_excite::cli::{parse_config, run_sweep, run_validation, Mode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/kernels-check.cfg".into());
    let cfg = parse_config(&std::fs::read_to_string(&path)?)?;
    println!("{path}: mode {}, config hash {}", cfg.mode, cfg.config_hash());
    if cfg.mode == Mode::Sweep {
        let out = run_sweep(&cfg)?;
        println!("slope: {:?}", out.result.fit.map(|f| f.slope));
    } else {
        let out = run_validation(&cfg)?;
        for c in out.checks {
            println!("{:<32} {}", c.name, if c.passed { "pass" } else { "FAIL" });
        }
    }
    Ok(())
}
