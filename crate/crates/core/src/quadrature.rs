//! Composite Simpson quadrature with successive panel doubling.
//!
//! The integration range is split at caller-supplied breakpoints (support
//! edges, kernel peaks, table nodes) so that every sub-interval carries a
//! smooth integrand. Each sub-interval is refined independently by halving
//! its panel width; trapezoid sums are reused between levels so every
//! refinement only evaluates the new midpoints.

use thiserror::Error;

/// Default absolute tolerance between successive Simpson estimates.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

const INITIAL_PANELS: usize = 8;
const MAX_LEVELS: u32 = 18;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("quadrature did not converge: estimate {estimate}, last successive difference {achieved:e}")]
pub struct QuadratureError {
    pub estimate: f64,
    pub achieved: f64,
}

/// Integrates `f` over `[lo, hi]`, splitting at every breakpoint that lies
/// strictly inside the range. The sum of successive-difference estimates over
/// all sub-intervals is kept below `tol`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, breakpoints: &[f64], tol: f64) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(lo);
    edges.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));

    let pieces = (edges.len() - 1).max(1);
    let piece_tol = tol / pieces as f64;
    let mut total = 0.0;
    let mut failure: Option<f64> = None;
    for w in edges.windows(2) {
        match simpson_refined(&f, w[0], w[1], piece_tol) {
            Ok(v) => total += v,
            Err(e) => {
                total += e.estimate;
                failure = Some(failure.unwrap_or(0.0) + e.achieved);
            }
        }
    }
    match failure {
        None => Ok(total),
        Some(achieved) => Err(QuadratureError { estimate: total, achieved }),
    }
}

fn simpson_refined<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    let mut panels = INITIAL_PANELS;
    let mut h = (b - a) / panels as f64;
    // Trapezoid sum without the h factor: endpoints halved plus interior nodes.
    let mut trap = 0.5 * (f(a) + f(b)) + (1..panels).map(|i| f(a + i as f64 * h)).sum::<f64>();
    let mut prev_simpson: Option<f64> = None;
    let mut last_diff = f64::INFINITY;

    for _ in 0..MAX_LEVELS {
        let half = 0.5 * h;
        let mid: f64 = (0..panels).map(|i| f(a + half + i as f64 * h)).sum();
        let coarse = trap * h;
        trap += mid;
        panels *= 2;
        h = half;
        let fine = trap * h;
        let simpson = (4.0 * fine - coarse) / 3.0;
        if let Some(prev) = prev_simpson {
            last_diff = (simpson - prev).abs();
            if last_diff < tol {
                return Ok(simpson);
            }
        }
        prev_simpson = Some(simpson);
    }
    Err(QuadratureError { estimate: prev_simpson.unwrap_or(0.0), achieved: last_diff })
}
