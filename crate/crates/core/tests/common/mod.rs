//! Independent reference computations for the integration tests.
//!
//! None of these call into the library's numerics: kernels come from
//! eigenfunction expansions, the renewal solution from its Picard series,
//! simulator moments from the exact covariance recursion of the scheme.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Sums `term(n)` for n = 1, 2, ... until terms stay below `1e-18` for a while.
fn series(mut term: impl FnMut(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut quiet = 0;
    for n in 1..200_000 {
        let v = term(n);
        sum += v;
        if v.abs() < 1e-18 {
            quiet += 1;
            if quiet > 4 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    sum
}

/// Dirichlet heat kernel on `[0, L]` from the sine expansion.
pub fn dirichlet_eigen(t: f64, x: f64, y: f64, nu: f64, l: f64) -> f64 {
    2.0 / l
        * series(|n| {
            let k = n as f64 * PI / l;
            (k * x).sin() * (k * y).sin() * (-k * k * nu * t).exp()
        })
}

/// Neumann heat kernel on `[0, L]` from the cosine expansion.
pub fn neumann_eigen(t: f64, x: f64, y: f64, nu: f64, l: f64) -> f64 {
    1.0 / l
        + 2.0 / l
            * series(|n| {
                let k = n as f64 * PI / l;
                (k * x).cos() * (k * y).cos() * (-k * k * nu * t).exp()
            })
}

/// `∫₀ᴸ p_D(t, x, y) dy = Σ (2/(nπ))(1 − cos nπ) sin(nπx/L) e^{−n²π²νt/L²}`.
pub fn dirichlet_mass_eigen(t: f64, x: f64, nu: f64, l: f64) -> f64 {
    series(|n| {
        if n % 2 == 0 {
            return 0.0;
        }
        let k = n as f64 * PI / l;
        4.0 / (n as f64 * PI) * (k * x).sin() * (-k * k * nu * t).exp()
    })
}

/// Plain composite Simpson with `panels` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn cos2_bump(x: f64, center: f64, half_width: f64, height: f64) -> f64 {
    let d = (x - center) / half_width;
    if d.abs() >= 1.0 {
        0.0
    } else {
        height * (0.5 * PI * d).cos().powi(2)
    }
}

/// `(G_D u₀)_t(x)` for the cos² bump, via sine coefficients of `u₀`.
pub fn dirichlet_bump_semigroup(t: f64, x: f64, nu: f64, l: f64, center: f64, half_width: f64, height: f64) -> f64 {
    let (a, b) = (center - half_width, center + half_width);
    2.0 / l
        * series(|n| {
            let k = n as f64 * PI / l;
            let decay = (-k * k * nu * t).exp();
            if decay < 1e-20 {
                return 0.0;
            }
            let coef = simpson(|y| cos2_bump(y, center, half_width, height) * (k * y).sin(), a, b, 4000);
            coef * (k * x).sin() * decay
        })
}

fn ln_beta(p: f64, q: f64) -> f64 {
    libm::lgamma(p) + libm::lgamma(q) - libm::lgamma(p + q)
}

/// Solution of `f = a + c∫₀ᵗ f(s)(t − s)^{−1/2} ds` by Picard iteration.
///
/// Starting from `f₀ = a`, each iterate adds one power `t^{k/2}`, since
/// `∫₀ᵗ s^{k/2}(t − s)^{−1/2} ds = B(k/2 + 1, 1/2)·t^{(k+1)/2}`. The
/// positive terms are summed until they no longer change the total.
pub fn renewal_picard(a: f64, c: f64, t: f64) -> f64 {
    if c == 0.0 || t == 0.0 {
        return a;
    }
    let mut ln_coef = 0.0; // ln of the k-th coefficient / a, k = 0
    let mut sum = 1.0;
    let ln_c = c.ln();
    let ln_t = t.ln();
    let mut k = 0usize;
    let mut peaked = false;
    let mut last = 0.0;
    loop {
        ln_coef += ln_c + ln_beta(k as f64 / 2.0 + 1.0, 0.5);
        k += 1;
        let term = (ln_coef + 0.5 * k as f64 * ln_t).exp();
        sum += term;
        if term < last {
            peaked = true;
        }
        last = term;
        if (peaked && term < 1e-17 * sum) || k > 5000 {
            break;
        }
    }
    a * sum
}

/// Exact `E[u_n(x_j)²]` of the Euler–Maruyama scheme with `σ(u) = c·u`.
///
/// The scheme is `u' = A u + λ c·diag(u)·ξ` with independent centered `ξ`,
/// so `C' = A C Aᵀ + λ²c²·diag(q_j C_jj)` where `q_j` is the noise variance
/// of node `j`. Returns the diagonal of `C` after `steps` steps, walls included.
pub fn scheme_second_moment(
    neumann: bool,
    u0: &[f64],
    r: f64,
    lambda_c: f64,
    dt: f64,
    dx: f64,
    steps: usize,
) -> Vec<f64> {
    let n = u0.len();
    let mut c: Vec<f64> = (0..n * n).map(|k| u0[k / n] * u0[k % n]).collect();
    let q: Vec<f64> = (0..n)
        .map(|j| {
            let wall = j == 0 || j == n - 1;
            match (wall, neumann) {
                (true, true) => 2.0 * dt / dx,
                (true, false) => 0.0,
                _ => dt / dx,
            }
        })
        .collect();
    // A applied to index `i` of a row-major matrix
    let apply = |m: &[f64], row: bool| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        let at = |i: usize, k: usize| if row { m[i * n + k] } else { m[k * n + i] };
        for i in 0..n {
            for k in 0..n {
                let v = if i == 0 || i == n - 1 {
                    if neumann {
                        let inner = if i == 0 { 1 } else { n - 2 };
                        at(i, k) + 2.0 * r * (at(inner, k) - at(i, k))
                    } else {
                        0.0
                    }
                } else {
                    at(i, k) + r * (at(i + 1, k) - 2.0 * at(i, k) + at(i - 1, k))
                };
                if row {
                    out[i * n + k] = v;
                } else {
                    out[k * n + i] = v;
                }
            }
        }
        out
    };
    let s2 = lambda_c * lambda_c;
    for _ in 0..steps {
        let diag: Vec<f64> = (0..n).map(|j| c[j * n + j]).collect();
        c = apply(&apply(&c, true), false);
        for j in 0..n {
            c[j * n + j] += s2 * q[j] * diag[j];
        }
    }
    (0..n).map(|j| c[j * n + j]).collect()
}

/// Exhaustive scan for the extrema of `values` at `xs`.
pub fn scan_extrema(xs: &[f64], values: &[f64], eps: f64, length: f64) -> (f64, f64, f64) {
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    let mut inf_eps = f64::INFINITY;
    for i in 0..xs.len() {
        inf = inf.min(values[i]);
        sup = sup.max(values[i]);
        if xs[i] >= eps - 1e-12 && xs[i] <= length - eps + 1e-12 {
            inf_eps = inf_eps.min(values[i]);
        }
    }
    (inf, sup, inf_eps)
}

/// `exp(λ⁴t/(8ν))·erfc(−λ²√(t/(8ν)))` via the Picard series.
pub fn pam_oracle(lambda: f64, t: f64, nu: f64) -> f64 {
    renewal_picard(1.0, lambda * lambda / (8.0 * PI * nu).sqrt(), t)
}
