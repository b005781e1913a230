mod common;

use common::*;
use proptest::prelude::*;
use spde_excite::renewal::pam_coefficient;
use spde_excite::stats::geometric_grid;
use spde_excite::{growth_exponent, pam_second_moment, renewal_closed_form, solve_renewal, RenewalError, RenewalSpec};
use std::f64::consts::PI;

#[test]
fn picard_series_reproduces_known_values() {
    // e^{z²} erfc(−z) at z = √π and z = 1/2, tabulated independently
    assert!((renewal_picard(1.0, 1.0, 1.0) - 46.0).abs() < 0.01);
    assert!((pam_oracle(1.0, 1.0, 0.5) - 0.25f64.exp() * 1.520_499_877_813_046_5).abs() < 1e-12);
}

#[test]
fn closed_form_matches_picard_series() {
    for &(a, c, t) in &[(1.0, 0.0, 5.0), (1.0, 1.0, 1.0), (2.5, 0.3, 2.0), (0.1, 2.0, 0.5), (1.0, 4.0 / PI.sqrt(), 1.0)]
    {
        let got = renewal_closed_form(a, c, t).unwrap();
        let oracle = renewal_picard(a, c, t);
        assert!((got.value / oracle - 1.0).abs() < 1e-12, "({a},{c},{t}): {} vs {oracle}", got.value);
        assert!((got.log_value - oracle.ln()).abs() < 1e-12);
    }
    assert_eq!(renewal_closed_form(1.0, 0.0, 5.0).unwrap().value, 1.0);
}

#[test]
fn closed_form_in_the_log_domain() {
    let v = renewal_closed_form(1.0, 10.0, 1.0).unwrap();
    assert!((v.log_value - (100.0 * PI + 2f64.ln())).abs() < 1e-9);
    assert!((v.log_value - 314.852).abs() < 1e-3);
    // far beyond f64 range the log stays finite
    let huge = renewal_closed_form(1.0, 1e3, 1.0).unwrap();
    assert!(huge.value.is_infinite() && huge.log_value.is_finite());
}

#[test]
fn pam_moment_values() {
    assert_eq!(pam_second_moment(0.0, 0.3, 0.5).unwrap().value, 1.0);
    let m = pam_second_moment(1.0, 1.0, 0.5).unwrap();
    assert!((m.value - 1.9524).abs() < 1e-4);
    let l = pam_second_moment(3.0, 0.5, 0.5).unwrap();
    assert!((l.log_value - 10.818).abs() < 1e-3, "{}", l.log_value);
    assert!((m.value - pam_oracle(1.0, 1.0, 0.5)).abs() < 1e-12);
    // the solver agrees with a = 1, c = λ²/√(8πν)
    let c = pam_coefficient(1.0, 0.5);
    let sol = solve_renewal(&RenewalSpec::new(1.0, c, 1.0, 1.0, 2048).unwrap()).unwrap();
    assert!((sol.values.last().unwrap() / m.value - 1.0).abs() < 1e-5);
}

#[test]
fn solver_accuracy_at_4096() {
    let spec = RenewalSpec::new(1.0, 1.0, 1.0, 1.0, 4096).unwrap();
    let sol = solve_renewal(&spec).unwrap();
    let last = *sol.values.last().unwrap();
    assert!((last - 46.0).abs() < 0.01);
    for (t, v) in sol.times.iter().zip(&sol.values).skip(1) {
        let oracle = renewal_picard(1.0, 1.0, *t);
        assert!((v / oracle - 1.0).abs() < 1e-4, "t={t}");
    }
}

#[test]
fn solver_converges_under_refinement() {
    let err = |n| solve_renewal(&RenewalSpec::new(1.0, 1.0, 1.0, 1.0, n).unwrap()).unwrap().max_relative_deviation;
    let errs: Vec<f64> = [256, 512, 1024, 2048].iter().map(|&n| err(n)).collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0]);
        assert!(w[0] / w[1] > 3.0, "{errs:?}");
    }
}

#[test]
fn zero_coupling_limit_is_constant() {
    let sol = solve_renewal(&RenewalSpec::new(1.0, 1e-300, 1.0, 3.0, 64).unwrap()).unwrap();
    assert!(sol.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
}

#[test]
fn rejects_bad_specs() {
    assert!(matches!(RenewalSpec::new(0.0, 1.0, 1.0, 1.0, 10), Err(RenewalError::NonPositive { name: "a", .. })));
    assert!(matches!(RenewalSpec::new(1.0, 1.0, 1.0, 1.0, 1), Err(RenewalError::TooFewSteps(1))));
    let coarse = RenewalSpec::new(1.0, 1.0, 100.0, 1.0, 8).unwrap();
    assert!(matches!(solve_renewal(&coarse), Err(RenewalError::GridTooCoarse(_))));
}

#[test]
fn exponent_of_synthetic_families() {
    let ks = geometric_grid(2.0, 20.0, 7);
    let sq: Vec<_> = ks.iter().map(|&k| (k, k * k)).collect();
    let quart: Vec<_> = ks.iter().map(|&k| (k, k.powi(4))).collect();
    assert!((growth_exponent(&sq).unwrap().fit.slope - 2.0).abs() < 1e-12);
    assert!((growth_exponent(&quart).unwrap().fit.slope - 4.0).abs() < 1e-12);
}

#[test]
fn exponent_two_over_the_k_window() {
    let ks = geometric_grid(1e2, 1e4, 9);
    // For z = k√π ≥ 100, ln(e^{z²} erfc(−z)) = z² + ln 2 up to e^{−z²}.
    let samples: Vec<_> = ks.iter().map(|&k| (k, PI * k * k + 2f64.ln())).collect();
    let oracle_fit = growth_exponent(&samples).unwrap();
    assert!((oracle_fit.fit.slope - 2.0).abs() < 0.02);
    let lib: Vec<_> = ks.iter().map(|&k| (k, renewal_closed_form(1.0, k, 1.0).unwrap().log_value)).collect();
    let lib_fit = growth_exponent(&lib).unwrap();
    assert!((lib_fit.fit.slope - oracle_fit.fit.slope).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_agrees_with_series(a in 0.1f64..10.0, bk in 0.01f64..4.0, t in 0.01f64..1.0) {
        // bk·√(πT) ≤ 4 with T = 1
        let c = bk / PI.sqrt();
        let got = renewal_closed_form(a, c, t).unwrap().value;
        let oracle = renewal_picard(a, c, t);
        prop_assert!((got / oracle - 1.0).abs() < 1e-10);
    }

    #[test]
    fn closed_form_monotone_in_t_and_c(c in 0.0f64..5.0, t in 0.0f64..1.0, dc in 0.0f64..1.0, dt in 0.0f64..1.0) {
        let base = renewal_closed_form(1.0, c, t).unwrap().log_value;
        prop_assert!(renewal_closed_form(1.0, c + dc, t).unwrap().log_value >= base);
        prop_assert!(renewal_closed_form(1.0, c, t + dt).unwrap().log_value >= base);
        prop_assert!(base >= 0.0);
    }

    #[test]
    fn solver_is_monotone_and_linear_in_a(a in 0.1f64..5.0, c in 0.05f64..1.5) {
        let sol = solve_renewal(&RenewalSpec::new(a, c, 1.0, 1.0, 256).unwrap()).unwrap();
        prop_assert!(sol.values.windows(2).all(|w| w[1] >= w[0]));
        let unit = solve_renewal(&RenewalSpec::new(1.0, c, 1.0, 1.0, 256).unwrap()).unwrap();
        for (x, y) in sol.values.iter().zip(&unit.values) {
            prop_assert!((x / (a * y) - 1.0).abs() < 1e-12);
        }
        prop_assert!(sol.max_relative_deviation < 1e-3);
    }
}
