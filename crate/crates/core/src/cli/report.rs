//! Output files: `sweep.csv`, `summary.json`, `loglog.svg`, `validation.json`.

use super::checks::Check;
use super::config::ExperimentConfig;
use crate::estimators::{SweepResult, SweepRow};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "lambda,log_energy,log_energy_ci,I,S,I_eps,n_effective,flags";

/// 17 significant digits.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn flags(r: &SweepRow) -> String {
    let mut f = Vec::new();
    if !r.in_window {
        f.push("outside_window".to_string());
    }
    if r.unreliable {
        f.push("unreliable".to_string());
    }
    if r.failed > 0 {
        f.push(format!("failed={}", r.failed));
    }
    f.join(";")
}

pub fn provenance_line(cfg: &ExperimentConfig) -> String {
    format!("config_hash={} seed={}", cfg.config_hash(), cfg.seed)
}

pub fn sweep_csv(cfg: &ExperimentConfig, result: &SweepResult) -> String {
    let mut s = format!("# spde-excite sweep {}\n{CSV_HEADER}\n", provenance_line(cfg));
    for r in &result.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            num(r.lambda),
            num(r.log_energy),
            num(r.log_energy_ci),
            num(r.inf),
            num(r.sup),
            num(r.inf_eps),
            r.n_effective,
            flags(r)
        );
    }
    s
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn config_object(cfg: &ExperimentConfig) -> Value {
    let map: Map<String, Value> = cfg
        .resolved
        .iter()
        .filter(|(k, _)| k != "out" && k != "workers")
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    Value::Object(map)
}

pub fn summary_json(cfg: &ExperimentConfig, result: &SweepResult, synthetic: bool) -> Value {
    let (slope, slope_se) = match &result.fit {
        Some(f) => (json!(f.slope), finite(f.slope_se)),
        None => (json!("undefined (insufficient points)"), Value::Null),
    };
    json!({
        "tool": "spde-excite",
        "mode": "sweep",
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "synthetic": synthetic,
        "bc": result.bc.to_string(),
        "t": result.t,
        "dx": result.dx,
        "eps": result.eps,
        "slope": slope,
        "slope_se": slope_se,
        "fit_error": result.fit_error,
        "fit": result.fit.as_ref().map(|f| json!({
            "slope": f.slope,
            "slope_se": finite(f.slope_se),
            "intercept": f.intercept,
            "residual_se": finite(f.residual_se),
            "points": f.points,
        })),
        "fit_window": {
            "window_limit": result.window_limit,
            "lambdas": result.fit_window,
            "excluded": result.excluded.iter().map(|p| json!({
                "lambda": p.parameter,
                "log_energy": finite(p.log_value),
                "reason": p.reason,
            })).collect::<Vec<_>>(),
        },
        "rows": result.rows.iter().map(|r| json!({
            "lambda": r.lambda,
            "log_energy": finite(r.log_energy),
            "log_energy_ci": finite(r.log_energy_ci),
            "I": finite(r.inf),
            "S": finite(r.sup),
            "S_half_width": finite(r.sup_half_width),
            "I_eps": finite(r.inf_eps),
            "n_effective": r.n_effective,
            "failed": r.failed,
            "flags": flags(r),
        })).collect::<Vec<_>>(),
        "warnings": cfg.warnings,
        "config": config_object(cfg),
    })
}

pub fn validation_json(cfg: &ExperimentConfig, checks: &[Check]) -> Value {
    json!({
        "tool": "spde-excite",
        "mode": cfg.mode.as_str(),
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "passed": checks.iter().all(|c| c.passed),
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "worst": finite(c.worst),
            "allowed": finite(c.allowed),
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "config": config_object(cfg),
    })
}

/// Scatter of `log log E` against `log λ` with the fitted line.
pub fn loglog_svg(cfg: &ExperimentConfig, result: &SweepResult) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 60.0;
    let points: Vec<(f64, f64, bool)> = result
        .rows
        .iter()
        .filter(|r| r.log_energy.is_finite() && r.log_energy > 0.0)
        .map(|r| (r.lambda.ln(), r.log_energy.ln(), result.fit_window.contains(&r.lambda)))
        .collect();

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, "<!-- spde-excite {} -->", provenance_line(cfg));
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let title = match &result.fit {
        Some(f) => format!("{} boundary: slope {:.3} ± {:.3}", result.bc, f.slope, 1.96 * f.slope_se),
        None => format!("{} boundary: slope undefined (insufficient points)", result.bc),
    };
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        W / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log lambda</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">log log E</text>"#,
        H / 2.0,
        H / 2.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );

    if !points.is_empty() {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y, _) in &points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let grow = |lo: f64, hi: f64| {
            let m = ((hi - lo) * 0.1).max(0.1);
            (lo - m, hi + m)
        };
        let (x0, x1) = grow(x0, x1);
        let (y0, y1) = grow(y0, y1);
        let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        for (label, v, is_x) in [(x0, x0, true), (x1, x1, true), (y0, y0, false), (y1, y1, false)] {
            let (tx, ty, anchor) =
                if is_x { (px(v), H - PAD + 16.0, "middle") } else { (PAD - 6.0, py(v) + 4.0, "end") };
            let _ = writeln!(
                s,
                r#"<text x="{tx:.2}" y="{ty:.2}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{label:.3}</text>"#
            );
        }
        if let Some(f) = &result.fit {
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="1.5"/>"#,
                px(x0),
                py(f.intercept + f.slope * x0),
                px(x1),
                py(f.intercept + f.slope * x1)
            );
        }
        for &(x, y, used) in &points {
            let fill = if used { "black" } else { "none" };
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{fill}" stroke="black"/>"#, px(x), py(y));
        }
    }
    s.push_str("</svg>\n");
    s
}
