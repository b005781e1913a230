//! Streaming moments and least-squares fits.

use serde::Serialize;
use thiserror::Error;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Welford accumulator; `merge` uses the Chan et al. pairwise update so
/// chunked accumulation combines exactly like a single pass would.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// 95% normal-approximation half-width of the mean.
    pub fn half_width(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        Z95 * (self.variance() / self.count as f64).sqrt()
    }
}

/// Vector-valued [`RunningMoments`], one slot per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMoments {
    slots: Vec<RunningMoments>,
}

impl FieldMoments {
    pub fn new(len: usize) -> Self {
        Self { slots: vec![RunningMoments::new(); len] }
    }

    pub fn push(&mut self, values: impl IntoIterator<Item = f64>) {
        for (slot, v) in self.slots.iter_mut().zip(values) {
            slot.push(v);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.slots.iter_mut().zip(&other.slots) {
            a.merge(b);
        }
    }

    pub fn slots(&self) -> &[RunningMoments] {
        &self.slots
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {needed} usable points, have {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("abscissae are all equal; slope undefined")]
    DegenerateAbscissae,
}

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    /// Residual standard error with `n − 2` degrees of freedom.
    pub residual_se: f64,
    pub points: usize,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit, FitError> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return Err(FitError::InsufficientPoints { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(FitError::DegenerateAbscissae);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let (residual_se, slope_se) = if n > 2 {
        let s2 = sse / (nf - 2.0);
        (s2.sqrt(), (s2 / sxx).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(LinearFit { slope, intercept, slope_se, residual_se, points: n })
}

/// A rejected fit input and why it was rejected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedPoint {
    pub parameter: f64,
    pub log_value: f64,
    pub reason: String,
}

/// Slope of `log log F` against `log p` for samples `(p, log F(p))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogLogFit {
    pub fit: LinearFit,
    pub used: Vec<f64>,
    pub rejected: Vec<RejectedPoint>,
}

/// Fits `log(log F)` against `log p`. Points whose `log F` is not strictly
/// positive (or whose parameter is not positive) cannot enter the fit and
/// are returned in `rejected`; at least three survivors are required.
pub fn fit_log_log(samples: &[(f64, f64)]) -> Result<LogLogFit, (FitError, Vec<RejectedPoint>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = Vec::new();
    let mut rejected = Vec::new();
    for &(p, log_f) in samples {
        if !(p > 0.0) || !p.is_finite() {
            rejected.push(RejectedPoint { parameter: p, log_value: log_f, reason: "parameter not positive".into() });
        } else if !(log_f > 0.0) || !log_f.is_finite() {
            rejected.push(RejectedPoint {
                parameter: p,
                log_value: log_f,
                reason: "log value not positive; log log undefined".into(),
            });
        } else {
            xs.push(p.ln());
            ys.push(log_f.ln());
            used.push(p);
        }
    }
    if xs.len() < 3 {
        return Err((FitError::InsufficientPoints { needed: 3, got: xs.len() }, rejected));
    }
    match ols(&xs, &ys) {
        Ok(fit) => Ok(LogLogFit { fit, used, rejected }),
        Err(e) => Err((e, rejected)),
    }
}

/// `count` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { hi } else { lo * (ratio * i as f64).exp() }).collect()
        }
    }
}
