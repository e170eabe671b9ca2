mod common;

use approx::assert_relative_eq;
use bvp4_core::kernel::*;
use bvp4_core::quadrature::QuadratureRule;
use common::*;
use proptest::prelude::*;

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

#[test]
fn green_bounds_on_grid() {
    for t in grid(200) {
        let rho = rho_bound(t).unwrap();
        for s in grid(200) {
            let g = green_g(t, s).unwrap();
            let e = e_bound(s).unwrap();
            assert!(g >= -1e-15, "G({t},{s}) = {g}");
            assert!(rho * e - 1e-14 <= g && g <= e + 1e-14, "sandwich at ({t},{s})");
        }
    }
    for theta in [0.1, 0.25, 0.4] {
        for t in grid(200).filter(|t| *t >= theta && *t <= 1.0 - theta) {
            for s in grid(200) {
                let g = green_g(t, s).unwrap();
                let e = e_bound(s).unwrap();
                assert!(theta.powi(3) * e - 1e-14 <= g && g <= e + 1e-14);
            }
        }
    }
}

#[test]
fn seam_is_twice_continuously_differentiable() {
    let branch_left = |t: f64, s: f64| (t.powi(3) * (1.0 - s).powi(2) - (t - s).powi(3)) / 6.0;
    let branch_right = |t: f64, s: f64| t.powi(3) * (1.0 - s).powi(2) / 6.0;
    for t in grid(57).skip(1) {
        let below = green_g(t, t - 1e-13).unwrap();
        let above = green_g(t, (t + 1e-13).min(1.0)).unwrap();
        assert!((below - above).abs() < 1e-12);
        // both polynomial branches agree in value and first two s-derivatives at s = t
        let h = 1e-4;
        for k in 0..3 {
            let d = |g: &dyn Fn(f64) -> f64| match k {
                0 => g(t),
                1 => (g(t + h) - g(t - h)) / (2.0 * h),
                _ => (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h),
            };
            let l = d(&|s| branch_left(t, s));
            let r = d(&|s| branch_right(t, s));
            assert!((l - r).abs() < 1e-6, "derivative {k} at t = {t}");
        }
    }
}

#[test]
fn closed_form_values() {
    assert_relative_eq!(green_g(0.5, 0.5).unwrap(), 1.0 / 192.0, max_relative = 1e-15);
    for s in grid(31) {
        assert_relative_eq!(green_g(1.0, s).unwrap(), e_bound(s).unwrap(), epsilon = 1e-16);
        assert_eq!(green_g(s, 1.0).unwrap(), 0.0);
    }
    assert_eq!(e_bound(0.5).unwrap(), 1.0 / 48.0);
    assert_eq!(rho_bound(0.25).unwrap(), 1.0 / 64.0);
    assert_eq!(rho_bound(0.5).unwrap(), 0.125);
    assert_relative_eq!(integral_g_over_t(0.25).unwrap(), 0.25 * 0.5625 * 1.75 / 24.0, max_relative = 1e-15);
}

#[test]
fn e_integral_by_simpson() {
    let v = QuadratureRule::simpson(101).unwrap().integrate(|s| e_bound(s).unwrap(), 0.0, 1.0).unwrap();
    assert!((v - 1.0 / 72.0).abs() < 1e-12);
}

#[test]
fn integral_of_g_brute_force() {
    let rule = QuadratureRule::simpson(10_000).unwrap();
    for s in [0.5, 0.25] {
        let q = rule.clone().with_seams(&[s]).unwrap().integrate(|t| green_g(t, s).unwrap(), 0.0, 1.0).unwrap();
        assert!((q - integral_g_over_t(s).unwrap()).abs() < 1e-12);
    }
    assert!((integral_g_over_t(0.5).unwrap() - 1.0 / 128.0).abs() < 1e-16);
}

#[test]
fn seam_split_integral_matches_branches() {
    // ∫₀¹ G(0.37, s) ds from the two polynomial branches integrated by hand.
    let t: f64 = 0.37;
    let exact = (t.powi(3) / 3.0 - t.powi(4) / 4.0) / 6.0;
    let rule = QuadratureRule::simpson(8).unwrap().with_seams(&[t]).unwrap();
    let q = rule.integrate(|s| green_g(t, s).unwrap(), 0.0, 1.0).unwrap();
    assert!((q - exact).abs() < 1e-12, "{q} vs {exact}");
}

#[test]
fn h_reduces_and_vanishes() {
    let plain = bvp4_core::ProblemSpec::parse(0.0, vec![], vec![], "u").unwrap();
    for t in grid(11) {
        for s in grid(11) {
            assert_eq!(green_h(t, s, &plain).unwrap(), green_g(t, s).unwrap());
        }
    }
    for p in examples() {
        for t in grid(23) {
            assert_eq!(green_h(t, 0.0, &p).unwrap(), 0.0);
            assert!(green_h(t, 1.0, &p).unwrap().abs() < 1e-18);
        }
    }
}

#[test]
fn k_values_of_the_examples() {
    let expected = [5.0 / 21.0, 0.5, 15.0 / 16.0, 17.0 / 20.0];
    for (p, k) in examples().iter().zip(expected) {
        assert!((compute_k(p).unwrap() - k).abs() < 1e-15);
    }
    let r = constants_report(&ex53(), DEFAULT_THETA).unwrap();
    assert!((r.lambda1 - 5.625).abs() < 1e-12);
    let r = constants_report(&ex51(), DEFAULT_THETA).unwrap();
    assert!((r.phi - 0.7).abs() < 1e-15);
    assert!((r.lambda1 - 10.0 / 7.0).abs() < 1e-14);
}

fn ex54_psi_closed(theta: f64) -> f64 {
    theta.powi(6) * (1.0 - 2.0 * theta).powi(3)
        * (103.0 + 206.0 * theta - 212.0 * theta * theta + 8.0 * theta.powi(3))
        / 6528.0
}

#[test]
fn psi_closed_form_example_54() {
    let rule = QuadratureRule::default_constants();
    for theta in [0.15, 0.2, 0.25, 0.3, 0.4, 0.45] {
        let q = psi_constant(&ex54(), theta, &rule).unwrap();
        assert_relative_eq!(q, ex54_psi_closed(theta), max_relative = 1e-10);
    }
    let quarter = 141.375 / (6528.0 * 4096.0 * 8.0);
    assert_relative_eq!(ex54_psi_closed(0.25), quarter, max_relative = 1e-14);
    assert!((quarter - 6.6091e-7).abs() < 1e-11);
}

#[test]
fn example_54_theta_inequality() {
    let (lo, hi) = (17.0 / 125.0, 12.0 / 25.0);
    for i in 0..1000 {
        let th: f64 = lo + (hi - lo) * i as f64 / 999.0;
        let v = 1e9 * th.powi(12) * (1.0 - 2.0 * th).powi(5)
            * (103.0 + 206.0 * th - 212.0 * th * th + 8.0 * th.powi(3));
        assert!(v >= 1.0, "theta = {th}: {v}");
    }
}

#[test]
fn h_term_by_term_example_54() {
    // G(1, 1/2) + (α/k)∫G(τ,1/2)dτ + (β/k)G(1/2, 1/2) with α/k = 2/17, β/k = 1/17.
    let expected = 1.0 / 48.0 + (2.0 / 17.0) / 128.0 + (1.0 / 17.0) / 192.0;
    assert_relative_eq!(green_h(1.0, 0.5, &ex54()).unwrap(), expected, max_relative = 1e-15);
    // 1 + α/k = 19/17 makes the upper weight at s = 1/2 equal (19/17)e(1/2) + (1/17)G(1/2,1/2).
    let w = GreenKernel::new(&ex54()).unwrap().upper_weight(0.5);
    assert_relative_eq!(w, 19.0 / 17.0 / 48.0 + 1.0 / 17.0 / 192.0, max_relative = 1e-15);
}

proptest! {
    #[test]
    fn integral_g_matches_quadrature(s in 0.0f64..=1.0) {
        let rule = QuadratureRule::gauss_legendre4(16).unwrap();
        let rule = if s > 0.0 && s < 1.0 { rule.with_seams(&[s]).unwrap() } else { rule };
        let q = rule.integrate(|t| green_g(t, s).unwrap(), 0.0, 1.0).unwrap();
        prop_assert!((q - integral_g_over_t(s).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn h_nonnegative_and_below_upper_weight(t in 0.0f64..=1.0, s in 0.0f64..=1.0, which in 0usize..4) {
        let p = &examples()[which];
        let kern = GreenKernel::new(p).unwrap();
        let h = kern.h(t, s);
        prop_assert!(h >= -1e-15);
        prop_assert!(h <= kern.upper_weight(s) + 1e-14);
    }

    #[test]
    fn phi_lambda_consistent(alpha in 0.0f64..0.5, b1 in 0.0f64..0.2, b2 in 0.0f64..0.2, theta in 0.01f64..0.49) {
        let p = bvp4_core::ProblemSpec::parse(alpha, vec![b1, b2], vec![0.3, 0.6], "u").unwrap();
        let r = constants_report(&p, theta).unwrap();
        prop_assert!((r.k - (1.0 - alpha - b1 - b2)).abs() < 1e-15);
        prop_assert!((r.phi * r.lambda1 - 1.0).abs() < 1e-14);
        prop_assert!((r.psi * r.lambda2 - 1.0).abs() < 1e-14);
        prop_assert!(r.psi > 0.0);
    }
}
