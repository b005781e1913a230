//! Special functions for the renewal resolvent.

use libm::erfc;

/// `ln(e^{z²} · erfc(−z))` for `z ≥ 0`.
///
/// Uses `erfc(−z) = 2 − erfc(z)`, which keeps full relative precision for
/// every `z ≥ 0` and never forms `e^{z²}` directly.
pub fn ln_exp_sq_erfc_neg(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    z * z + std::f64::consts::LN_2 + (-0.5 * erfc(z)).ln_1p()
}
