mod common;

use common::*;
use proptest::prelude::*;
use spde_excite::kernels::{
    half_bound_horizon, kernel, neumann_gaussian_ratio_bound, DEFAULT_TRUNCATION_TOL, MIN_IMAGES,
};
use spde_excite::quadrature::integrate;
use spde_excite::{
    dirichlet_kernel, dirichlet_lower_factor, gaussian_kernel, image_truncation_error, kernel_mass, neumann_kernel,
    semigroup_apply, InitialCondition, KernelKind, KernelParams, Truncation,
};

fn unit() -> KernelParams {
    KernelParams::new(1.0, 1.0).unwrap()
}

#[test]
fn dirichlet_matches_sine_series() {
    let p = unit();
    for &t in &[0.001, 0.01, 0.1, 1.0] {
        for &(x, y) in &[(0.5, 0.5), (0.1, 0.3), (0.9, 0.95), (0.02, 0.98)] {
            let a = dirichlet_kernel(t, x, y, &p).unwrap();
            let b = dirichlet_eigen(t, x, y, 1.0, 1.0);
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "t={t} x={x} y={y}: {a} vs {b}");
        }
    }
    let v = dirichlet_kernel(0.01, 0.5, 0.5, &p).unwrap();
    assert!((v - 2.820948).abs() < 5e-7, "{v}");
}

#[test]
fn neumann_matches_cosine_series() {
    let p = unit();
    for &t in &[0.001, 0.01, 0.1, 1.0] {
        for &(x, y) in &[(0.0, 0.0), (0.0, 0.05), (0.3, 0.7), (1.0, 0.9)] {
            let a = neumann_kernel(t, x, y, &p).unwrap();
            let b = neumann_eigen(t, x, y, 1.0, 1.0);
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "t={t} x={x} y={y}: {a} vs {b}");
        }
    }
    assert!((neumann_kernel(10.0, 0.3, 0.7, &p).unwrap() - 1.0).abs() < 1e-10);
    let doubled = 2.0 * gaussian_kernel(0.01, 0.0, 0.05, 1.0).unwrap();
    let v = neumann_kernel(0.01, 0.0, 0.05, &p).unwrap();
    assert!((v / doubled - 1.0).abs() < 1e-6);
}

#[test]
fn non_unit_length_and_diffusion() {
    let p = KernelParams::new(2.5, 0.5).unwrap();
    for &(t, x, y) in &[(0.05, 0.4, 2.2), (0.7, 1.25, 1.25), (3.0, 0.0, 2.5)] {
        let d = dirichlet_kernel(t, x, y, &p).unwrap();
        let n = neumann_kernel(t, x, y, &p).unwrap();
        assert!((d - dirichlet_eigen(t, x, y, 0.5, 2.5)).abs() < 1e-10);
        assert!((n - neumann_eigen(t, x, y, 0.5, 2.5)).abs() < 1e-10);
    }
}

#[test]
fn truncation_bounds() {
    let p = unit();
    assert!(image_truncation_error(0.01, &p, 2).unwrap() < 1e-80);
    assert!(image_truncation_error(1.0, &p, 10).unwrap() < 1e-30);
    let mut last = f64::INFINITY;
    for n in 1..12 {
        let b = image_truncation_error(0.3, &p, n).unwrap();
        assert!(b <= last);
        last = b;
    }
    // Fixed truncation at the minimum image count still meets the bound it reports.
    let fixed = KernelParams::with_truncation(1.0, 1.0, Truncation::Fixed(MIN_IMAGES)).unwrap();
    for &t in &[0.01, 0.5, 2.0] {
        let err = (dirichlet_kernel(t, 0.2, 0.7, &fixed).unwrap() - dirichlet_eigen(t, 0.2, 0.7, 1.0, 1.0)).abs();
        assert!(err <= fixed.truncation_bound_at(t) + 1e-13);
    }
    assert!(unit().truncation_bound_at(0.5) <= DEFAULT_TRUNCATION_TOL);
}

#[test]
fn lower_factor_values() {
    let eps = 0.25;
    let t0 = half_bound_horizon(eps, 1.0);
    assert!((t0 - eps * eps / 4f64.ln()).abs() < 1e-16);
    assert!((dirichlet_lower_factor(t0, eps, 1.0).unwrap() - 0.5).abs() < 1e-15);
    assert!((dirichlet_lower_factor(eps * eps, eps, 1.0).unwrap() - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-15);
    assert!(dirichlet_lower_factor(1e-6, eps, 1.0).unwrap() > 1.0 - 1e-15);
}

#[test]
fn dirichlet_mass_matches_series() {
    let p = unit();
    let m = kernel_mass(KernelKind::Dirichlet, 0.1, 0.5, &p).unwrap();
    let oracle = dirichlet_mass_eigen(0.1, 0.5, 1.0, 1.0);
    assert!((m - oracle).abs() < 1e-8, "{m} vs {oracle}");
    assert!((oracle - 0.4745).abs() < 1e-4);
    assert!(kernel_mass(KernelKind::Dirichlet, 1e-5, 0.5, &p).unwrap() > 1.0 - 1e-8);
    for &(t, x) in &[(0.01, 0.1), (0.3, 0.8), (1.0, 0.5)] {
        let m = kernel_mass(KernelKind::Dirichlet, t, x, &p).unwrap();
        assert!((m - dirichlet_mass_eigen(t, x, 1.0, 1.0)).abs() < 1e-8);
        assert!((kernel_mass(KernelKind::Neumann, t, x, &p).unwrap() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn semigroup_matches_spectral_oracle() {
    let p = unit();
    let u0 = InitialCondition::Bump { center: 0.5, half_width: 0.1, height: 1.0 };
    let grid = [0.0, 0.25, 0.5, 0.6];
    let got = semigroup_apply(KernelKind::Dirichlet, &u0, 0.05, &p, &grid).unwrap();
    assert_eq!(got[0], 0.0);
    for (x, g) in grid.iter().zip(&got).skip(1) {
        let oracle = dirichlet_bump_semigroup(0.05, *x, 1.0, 1.0, 0.5, 0.1, 1.0);
        assert!((g - oracle).abs() < 1e-6, "x={x}: {g} vs {oracle}");
    }
    assert!(got[2] > 0.0);
    let flat = semigroup_apply(KernelKind::Neumann, &InitialCondition::Flat { height: 1.0 }, 0.2, &p, &grid).unwrap();
    assert!(flat.iter().all(|v| (v - 1.0).abs() < 1e-8));
}

#[test]
fn chapman_kolmogorov_on_a_few_points() {
    let p = unit();
    for kind in [KernelKind::Dirichlet, KernelKind::Neumann] {
        for &(s, t, x, y) in &[(0.01, 0.02, 0.3, 0.4), (0.1, 0.05, 0.0, 1.0), (0.2, 0.3, 0.5, 0.9)] {
            let lhs = integrate(
                |z| kernel(kind, s, x, z, &p).unwrap() * kernel(kind, t, z, y, &p).unwrap(),
                0.0,
                1.0,
                &[x, y],
                1e-12,
            )
            .unwrap();
            let rhs = kernel(kind, s + t, x, y, &p).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "{kind:?} {lhs} {rhs}");
        }
    }
}

#[test]
fn ratio_bound_is_attained_near_walls() {
    let r = neumann_gaussian_ratio_bound(1.0, &unit(), 11).unwrap();
    // At the wall the near image doubles the whole-line density.
    assert!(r.bound >= 2.0);
    assert!(r.bound.is_finite());
}

fn interior() -> impl Strategy<Value = f64> {
    0.0f64..=1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernels_are_symmetric(t in 1e-3f64..2.0, x in interior(), y in interior()) {
        let p = unit();
        prop_assert_eq!(dirichlet_kernel(t, x, y, &p).unwrap(), dirichlet_kernel(t, y, x, &p).unwrap());
        prop_assert_eq!(neumann_kernel(t, x, y, &p).unwrap(), neumann_kernel(t, y, x, &p).unwrap());
    }

    #[test]
    fn kernel_ordering(t in 1e-4f64..2.0, x in interior(), y in interior()) {
        let p = unit();
        let slack = p.truncation_bound_at(t) + 1e-12;
        let d = dirichlet_kernel(t, x, y, &p).unwrap();
        let g = gaussian_kernel(t, x, y, 1.0).unwrap();
        let n = neumann_kernel(t, x, y, &p).unwrap();
        prop_assert!(d >= -slack);
        prop_assert!(d <= g + slack);
        prop_assert!(g <= n + slack);
    }

    #[test]
    fn lemma_factor_bound(t in 1e-4f64..1.0, x in 0.01f64..0.99, y in 0.01f64..0.99) {
        let p = unit();
        let eps = x.min(y).min(1.0 - x).min(1.0 - y);
        let f = dirichlet_lower_factor(t, eps, 1.0).unwrap();
        let slack = p.truncation_bound_at(t) + 1e-12;
        let d = dirichlet_kernel(t, x, y, &p).unwrap();
        prop_assert!(d + slack >= f * gaussian_kernel(t, x, y, 1.0).unwrap());
    }

    #[test]
    fn half_bound_before_horizon(frac in 0.01f64..=1.0, x in 0.25f64..=0.75, y in 0.25f64..=0.75) {
        let p = unit();
        let t = frac * half_bound_horizon(0.25, 1.0);
        let slack = p.truncation_bound_at(t) + 1e-12;
        prop_assert!(dirichlet_kernel(t, x, y, &p).unwrap() + slack >= 0.5 * gaussian_kernel(t, x, y, 1.0).unwrap());
    }

    #[test]
    fn on_diagonal_identity(t in 5e-3f64..0.5, x in interior()) {
        let p = unit();
        for kind in [KernelKind::Dirichlet, KernelKind::Neumann] {
            let lhs = integrate(|y| kernel(kind, t, x, y, &p).unwrap().powi(2), 0.0, 1.0, &[x], 1e-12).unwrap();
            let rhs = kernel(kind, 2.0 * t, x, x, &p).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-6 * rhs.max(1.0));
        }
    }

    #[test]
    fn dirichlet_mass_decreases(t in 1e-3f64..1.0, x in 0.05f64..0.95) {
        let p = unit();
        let m1 = kernel_mass(KernelKind::Dirichlet, t, x, &p).unwrap();
        let m2 = kernel_mass(KernelKind::Dirichlet, 1.5 * t, x, &p).unwrap();
        prop_assert!(m1 > 0.0 && m1 < 1.0);
        prop_assert!(m2 <= m1 + 1e-10);
    }
}
