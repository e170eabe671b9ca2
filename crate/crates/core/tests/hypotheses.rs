mod common;

use bvp4_core::hypotheses::*;
use bvp4_core::kernel::psi_constant;
use bvp4_core::operator::{apply_t, find_positive_solutions, picard_solve, GridFunction, SolveSettings};
use bvp4_core::quadrature::QuadratureRule;
use bvp4_core::ProblemSpec;
use common::*;
use proptest::prelude::*;
use Classification::{Infinite, Zero};
use Functional::*;

fn no_declared() -> DeclaredLimits {
    DeclaredLimits::new()
}

fn report_for(reports: &[HypothesisReport], c: Condition) -> &HypothesisReport {
    reports.iter().find(|r| r.condition == c).unwrap()
}

#[test]
fn structural_conditions_of_second_example() {
    let reports = check_structural(&ex52());
    let c2 = report_for(&reports, Condition::C2);
    let c3 = report_for(&reports, Condition::C3);
    assert_eq!((c2.verdict, c2.evidence), (Verdict::Holds, Evidence::Exact));
    assert_eq!(c3.verdict, Verdict::Holds);
    assert_eq!(c3.values["k"], 0.5);
    assert_eq!(report_for(&reports, Condition::C1).verdict, Verdict::Holds);
}

#[test]
fn structural_violation_has_witness() {
    let p = ProblemSpec::parse(0.9, vec![0.2], vec![0.5], "u").unwrap();
    let c3 = report_for(&check_structural(&p), Condition::C3).clone();
    assert_eq!(c3.verdict, Verdict::Fails);
    assert!((c3.values["sum"] - 1.1).abs() < 1e-15);
    assert!(c3.witness.contains("1.1"), "{}", c3.witness);

    let p = ProblemSpec::parse(0.1, vec![-0.1, 0.2], vec![0.6, 0.5], "u").unwrap();
    let c2 = report_for(&check_structural(&p), Condition::C2).clone();
    assert_eq!(c2.verdict, Verdict::Fails);
    assert!(c2.witness.contains("beta[0]") && c2.witness.contains("eta[0]"), "{}", c2.witness);
}

#[test]
fn negative_nonlinearity_is_advisory() {
    let p = with_f(&ex51(), "u - 1");
    let c1 = report_for(&check_structural(&p), Condition::C1).clone();
    assert_eq!(c1.verdict, Verdict::Advisory);
    assert_eq!((c1.values["t"], c1.values["u"]), (0.0, 0.0));
    assert!(c1.witness.contains("= -1"), "{}", c1.witness);
}

/// Limits of f(t,u)/u for the four example nonlinearities, in the order
/// f0, fsup0, finf, fsupinf, derived by hand.
fn true_limits() -> Vec<(ProblemSpec, [Classification; 4])> {
    vec![
        (ex51(), [Infinite, Infinite, Zero, Zero]),
        (ex52(), [Zero, Zero, Infinite, Infinite]),
        (ex53(), [Infinite, Infinite, Infinite, Infinite]),
        (ex54(), [Zero, Zero, Zero, Zero]),
    ]
}

#[test]
fn limit_estimates_are_never_wrong() {
    for (i, (p, truth)) in true_limits().into_iter().enumerate() {
        for (functional, want) in Functional::ALL.into_iter().zip(truth) {
            let est = estimate_limit(&p, functional);
            assert!(
                est.classification == want || est.classification == Classification::Inconclusive,
                "example {i}, {}: {:?}",
                functional.key(),
                est.classification
            );
            assert!(est.samples.len() >= 3 || est.classification == Classification::Inconclusive);
        }
    }
}

#[test]
fn limits_claimed_for_the_examples() {
    let cases = [
        (ex51(), F0, Infinite),
        (ex51(), FSupInf, Zero),
        (ex52(), FSup0, Zero),
        (ex52(), FInf, Infinite),
        (ex53(), F0, Infinite),
        (ex53(), FInf, Infinite),
        (ex54(), FSup0, Zero),
        (ex54(), FSupInf, Zero),
    ];
    for (p, functional, want) in cases {
        assert_eq!(estimate_limit(&p, functional).classification, want, "{}", functional.key());
    }
}

#[test]
fn identity_nonlinearity_has_unit_limits() {
    let p = with_f(&ex51(), "u");
    for functional in Functional::ALL {
        let est = estimate_limit(&p, functional);
        assert_eq!(est.classification, Classification::Finite);
        assert!(est.slope.unwrap().abs() < 1e-12);
        assert!(est.samples.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-15));
        assert!(!est.flagged());
    }
}

#[test]
fn overflowing_samples_are_flagged() {
    let est = estimate_limit(&ex53(), FInf);
    assert!(est.flagged());
    assert_eq!(est.classification, Infinite);
    assert!(est.dropped.iter().all(|u| *u >= 1e3));
}

#[test]
fn growth_hypotheses_of_the_examples() {
    let expect = [
        (ex51(), Condition::H1),
        (ex52(), Condition::H2),
        (ex53(), Condition::H3),
        (ex54(), Condition::H5),
    ];
    for (p, c) in expect {
        let reports = check_H1_H2_H3_H5(&p, &no_declared());
        assert_eq!(reports.len(), 4);
        let r = report_for(&reports, c);
        assert_eq!(r.verdict, Verdict::Holds, "{c:?}: {}", r.witness);
        assert_eq!(r.evidence, Evidence::Sampled);
        // The other hypotheses ask for limits these nonlinearities do not have.
        for other in reports.iter().filter(|r| r.condition != c) {
            assert_ne!(other.verdict, Verdict::Holds, "{:?}", other.condition);
        }
    }
}

#[test]
fn declared_limits_override_sampling() {
    let p = with_f(&ex51(), "u");
    let mut declared = DeclaredLimits::new();
    declared.insert(F0, Infinite);
    declared.insert(FSupInf, Zero);
    let r = check_growth(&p, Condition::H1, &declared);
    assert_eq!(r.verdict, Verdict::HoldsDeclared);
    assert_eq!(r.verdict.label(), "holds (declared)");
    assert_eq!(r.evidence, Evidence::Declared);
    assert!(r.limits.is_empty());

    declared.insert(FSupInf, Infinite);
    assert_eq!(check_growth(&p, Condition::H1, &declared).verdict, Verdict::Advisory);
}

#[test]
fn upper_bound_on_third_example() {
    let r = check_H4(&ex53(), DEFAULT_THETA, 1.0, 5.625).unwrap();
    assert_eq!(r.verdict, Verdict::Holds, "{}", r.witness);
    assert!((r.values["sup"] - 2.0 * std::f64::consts::E).abs() < 1e-12);
    assert!((r.values["sup"] - 5.43656).abs() < 1e-5);
    assert!((r.values["lambda1"] - 5.625).abs() < 1e-12);
}

#[test]
fn upper_bound_failures_and_trivial_cases() {
    let r = check_H4(&with_f(&ex53(), "10"), DEFAULT_THETA, 1.0, 5.625).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    assert_eq!(r.values["sup"], 10.0);
    assert!(r.witness.contains("= 10"), "{}", r.witness);
    for rho in [1e-3, 1.0, 50.0] {
        let r = check_H4(&with_f(&ex53(), "0"), DEFAULT_THETA, rho, 1.0).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }
    let r = check_H4(&ex53(), DEFAULT_THETA, 1.0, 6.0).unwrap();
    assert_eq!(r.verdict, Verdict::Advisory);
    let r = check_H4(&with_f(&ex53(), "ln(u - 0.5)"), DEFAULT_THETA, 1.0, 5.0).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    assert!(r.values.contains_key("t") && r.values.contains_key("u"));
    assert!(check_H4(&ex53(), 0.7, 1.0, 5.0).is_err());
}

const DEFAULT_THETA: f64 = 0.25;

#[test]
fn lower_bound_on_last_example() {
    let p = ex54();
    let psi = psi_constant(&p, 0.25, &QuadratureRule::default_constants()).unwrap();
    let r = check_H6(&p, 0.25, 1.0, 1.0 / psi).unwrap();
    assert_eq!(r.verdict, Verdict::Holds, "{}", r.witness);
    assert!((r.values["u_lower"] - 0.25f64.powi(3) * 0.5).abs() < 1e-15);
    assert!(r.values["inf"] >= r.values["lambda2"]);
}

#[test]
fn lower_bound_fails_without_load() {
    for rho in [0.5, 1.0, 10.0] {
        let r = check_H6(&with_f(&ex54(), "0"), 0.25, rho, 1e5).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.values["inf"], 0.0);
    }
    let r = check_H6(&ex54(), 0.25, 1.0, 1.0).unwrap();
    assert_eq!(r.verdict, Verdict::Advisory);
}

#[test]
fn enlarging_upper_region_never_helps() {
    let fs = ["(1+t)*exp(u)", "u^2 + t", "sqrt(u) * (2 - t)", "6528e9 * u^2 * exp(1-u)"];
    let rhos = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0];
    for f in fs {
        let p = with_f(&ex53(), f);
        for bound in [0.5, 5.0, 100.0] {
            let verdicts: Vec<Verdict> = rhos
                .iter()
                .map(|&rho| check_H4(&p, 0.25, rho, bound / rho).unwrap().verdict)
                .collect();
            // Once the sampled region is large enough to fail, larger ones fail too.
            for w in verdicts.windows(2) {
                assert!(!(w[0] == Verdict::Fails && w[1] != Verdict::Fails), "{f}, bound {bound}: {verdicts:?}");
            }
        }
    }
}

#[test]
fn enlarging_lower_region_never_helps() {
    // Decreasing theta widens both the t range and the u range.
    let p = ex54();
    let thetas = [0.45, 0.4, 0.3, 0.25, 0.15, 0.1];
    for m in [1e3, 1e6, 1e9, 1e11] {
        let verdicts: Vec<bool> = thetas
            .iter()
            .map(|&th| check_H6(&p, th, 1.0, m).unwrap().values["inf"] >= m)
            .collect();
        for w in verdicts.windows(2) {
            assert!(w[0] || !w[1], "M2 = {m}: {verdicts:?}");
        }
    }
}

#[test]
fn cone_membership_examples() {
    for theta in [0.1, 0.25, 0.4] {
        let c = GridFunction::constant(41, 3.0).unwrap();
        assert_eq!(cone_check(&c, theta).unwrap().verdict, Verdict::Holds);
    }
    let u = GridFunction::from_fn(41, |t| t * (1.0 - t)).unwrap();
    let r = cone_check(&u, 0.25).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    assert!((r.values["min"] - 0.1875).abs() < 1e-15);
    assert!((r.values["bound"] - 0.25 / 128.0).abs() < 1e-15);

    let spike = GridFunction::from_fn(41, |t| t.powi(8)).unwrap();
    assert_eq!(cone_check(&spike, 0.4).unwrap().verdict, Verdict::Fails);
    assert!(cone_check(&u, 0.5).is_err());
    assert!(cone_check(&u, 0.0).is_err());
}

#[test]
fn computed_solution_lies_in_cone() {
    let p = ex51();
    let sol = picard_solve(&p, &SolveSettings::picard(), &GridFunction::constant(401, 0.0).unwrap()).unwrap();
    for theta in [0.1, 0.25, 0.4] {
        assert_eq!(cone_check(&sol.u, theta).unwrap().verdict, Verdict::Holds);
    }
}

#[test]
fn verification_of_analytic_and_wrong_solutions() {
    for p in examples() {
        let u = GridFunction::from_fn(401, |t| unit_load_u(&p, t)).unwrap();
        let r = verify_solution(&u, &with_f(&p, "1"));
        assert_eq!(r.verdict, Verdict::Holds, "{}", r.witness);
        assert!(r.values["fixed_point_residual"] < 1e-12);
    }
    let one = GridFunction::constant(401, 1.0).unwrap();
    let r = verify_solution(&one, &ex51());
    assert_eq!(r.verdict, Verdict::Fails);
    // u'''' = 0, so the scaled residual is max f / max f = 1.
    assert!((r.values["ode_residual"] - 1.0).abs() < 1e-9);
    assert!(r.witness.contains("||u - Tu||"));
}

#[test]
fn verification_of_computed_solutions() {
    let p = ex52();
    let found = find_positive_solutions(&p, &SolveSettings::newton(), &bvp4_core::operator::default_seeds()).unwrap();
    assert_eq!(found.len(), 1);
    let r = verify_solution(&found[0].u, &p);
    assert_eq!(r.verdict, Verdict::Holds, "{}", r.witness);
    for key in ["du_0", "du_1", "d2u_0"] {
        assert!(r.values[key].abs() < 1e-6);
    }
    assert!(r.values["nonlocal"].abs() < 1e-8);
    assert!(r.values["fixed_point_residual"] < 1e-8);
}

#[test]
fn stricter_thresholds_reject() {
    let p = ex51();
    let sol = picard_solve(&p, &SolveSettings::picard(), &GridFunction::constant(401, 0.0).unwrap()).unwrap();
    let strict = VerifyThresholds {
        fixed_point: 0.0,
        ..VerifyThresholds::default()
    };
    assert_eq!(verify_with(&sol.u, &p, &strict).verdict, Verdict::Fails);
}

#[test]
fn condition_names() {
    assert_eq!(Condition::from_name("h4"), Some(Condition::H4));
    assert_eq!(Condition::from_name(" C3 "), Some(Condition::C3));
    assert_eq!(Condition::from_name("H9"), None);
    for key in ["f0", "fsup0", "finf", "fsupinf"] {
        assert_eq!(Functional::from_key(key).unwrap().key(), key);
    }
}

fn bernstein(c: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |t| {
        let n = c.len() - 1;
        let mut binom = 1.0;
        let mut acc = 0.0;
        for (j, cj) in c.iter().enumerate() {
            acc += cj * binom * t.powi(j as i32) * (1.0 - t).powi((n - j) as i32);
            binom = binom * (n - j) as f64 / (j + 1) as f64;
        }
        acc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn image_of_nonnegative_function_is_in_cone(
        c in proptest::collection::vec(0.0f64..3.0, 5),
        which in 0usize..3,
        theta in prop::sample::select(vec![0.1, 0.25, 0.4]),
    ) {
        let p = &examples()[which];
        let u = GridFunction::from_fn(101, bernstein(&c)).unwrap();
        let tu = apply_t(&u, p).unwrap();
        prop_assert_eq!(cone_check(&tu, theta).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn failing_region_reports_witness(level in 0.1f64..100.0, rho in 0.01f64..10.0) {
        let p = with_f(&ex53(), &format!("{level:?} + u"));
        let r = check_H4(&p, 0.25, rho, 1.0).unwrap();
        if r.verdict == Verdict::Fails {
            prop_assert!(r.values.contains_key("t") && r.values.contains_key("u"));
            prop_assert!(r.values["sup"] > rho);
        } else {
            prop_assert!(level + rho <= rho);
        }
    }
}
