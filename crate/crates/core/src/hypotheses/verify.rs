use super::{Condition, Evidence, HypothesisReport, Verdict};
use crate::operator::{corrected_edge, GridFunction, NystromOperator};
use crate::problem::ProblemSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyThresholds {
    /// ‖u − Tu‖∞
    pub fixed_point: f64,
    /// |u'(0)|, |u'(1)|, |u''(0)|
    pub boundary: f64,
    /// |u(0) − α∫u − Σβᵢu(ηᵢ)|
    pub nonlocal: f64,
    /// Floor for the scaled interior ODE residual.
    pub ode: f64,
}

impl Default for VerifyThresholds {
    fn default() -> Self {
        Self {
            fixed_point: 1e-8,
            boundary: 1e-6,
            nonlocal: 1e-8,
            ode: 1e-4,
        }
    }
}

/// u'(0) from the five-point one-sided stencil.
fn d1_left(v: &[f64], h: f64) -> f64 {
    (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
}

/// u''(0) from the six-point one-sided stencil.
fn d2_left(v: &[f64], h: f64) -> f64 {
    (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4] - 10.0 * v[5])
        / (12.0 * h * h)
}

/// Stencil width used by the boundary estimates.
const EDGE: usize = 6;

/// Runs the four checks on `u` with the default thresholds.
pub fn verify_solution(u: &GridFunction, problem: &ProblemSpec) -> HypothesisReport {
    verify_with(u, problem, &VerifyThresholds::default())
}

/// Checks `u` against the problem in four independent ways:
///
/// 1. the discrete fixed-point residual ‖u − Tu‖∞ (the primary signal);
/// 2. u'(0), u'(1), u''(0) by one-sided fourth-order differences of u plus
///    the particular integral of the ODE (see [`corrected_edge`]); the plain
///    differences are reported alongside as `*_plain`;
/// 3. the nonlocal condition with Simpson's rule and Hermite interpolation;
/// 4. the interior residual of u'''' + f(t, u) by the five-point central
///    difference, relative to max(1, max|f|). Rounding in the stencil grows
///    like h⁻⁴, so the pass level is max(floor, 100·ε·h⁻⁴·max(1, ‖u‖)).
pub fn verify_with(u: &GridFunction, problem: &ProblemSpec, th: &VerifyThresholds) -> HypothesisReport {
    let v = u.values();
    let n = v.len();
    let h = u.step();
    let mut failures = Vec::new();
    let mut values = std::collections::BTreeMap::new();

    let fixed_point = NystromOperator::new(problem, n)
        .and_then(|op| op.apply(u))
        .map(|tu| tu.sup_distance(u));
    match fixed_point {
        Ok(r) => {
            values.insert("fixed_point_residual".into(), r);
            if !(r < th.fixed_point) {
                failures.push(format!("||u - Tu|| = {r:e}"));
            }
        }
        Err(e) => failures.push(format!("Tu not computable: {e}")),
    }

    let rev: Vec<f64> = v.iter().rev().copied().collect();
    let plain = [d1_left(v, h), -d1_left(&rev, h), d2_left(v, h)];
    let density: std::result::Result<Vec<f64>, String> = u
        .nodes()
        .zip(v)
        .map(|(t, &x)| match problem.f().eval(t, x.max(0.0)) {
            Ok(y) if y.is_finite() => Ok(y),
            _ => Err(format!("f not finite at t = {t}")),
        })
        .collect();
    match density {
        Ok(density) => {
            let rev_density: Vec<f64> = density.iter().rev().copied().collect();
            let left: [f64; EDGE] = corrected_edge(v, &density, h);
            let right: [f64; EDGE] = corrected_edge(&rev, &rev_density, h);
            let corrected = [d1_left(&left, h), -d1_left(&right, h), d2_left(&left, h)];
            for (i, name) in ["du_0", "du_1", "d2u_0"].into_iter().enumerate() {
                values.insert(format!("{name}_plain"), plain[i]);
                values.insert(name.into(), corrected[i]);
                if !(corrected[i].abs() < th.boundary) {
                    failures.push(format!("{name} = {:e}", corrected[i]));
                }
            }
        }
        Err(msg) => failures.push(msg),
    }

    let nonlocal = v[0]
        - problem.alpha() * u.integral()
        - problem
            .betas()
            .iter()
            .zip(problem.etas())
            .map(|(b, &eta)| b * u.eval(eta))
            .sum::<f64>();
    values.insert("nonlocal".into(), nonlocal);
    if !(nonlocal.abs() < th.nonlocal) {
        failures.push(format!("nonlocal residual = {nonlocal:e}"));
    }

    let h4 = h.powi(4);
    let mut ode = 0.0f64;
    let mut f_max = 0.0f64;
    let mut ode_ok = true;
    for i in 2..n - 2 {
        let t = u.node(i);
        match problem.f().eval(t, v[i].max(0.0)) {
            Ok(f) if f.is_finite() => {
                let d4 = (v[i - 2] - 4.0 * v[i - 1] + 6.0 * v[i] - 4.0 * v[i + 1] + v[i + 2]) / h4;
                ode = ode.max((d4 + f).abs());
                f_max = f_max.max(f.abs());
            }
            _ => {
                ode_ok = false;
                failures.push(format!("f not finite at t = {t}"));
                break;
            }
        }
    }
    if ode_ok {
        let scaled = ode / f_max.max(1.0);
        let level = th.ode.max(100.0 * f64::EPSILON / h4 * u.sup_norm().max(1.0));
        values.insert("ode_residual".into(), scaled);
        values.insert("ode_threshold".into(), level);
        if !(scaled < level) {
            failures.push(format!("scaled ODE residual = {scaled:e} (level {level:e})"));
        }
    }

    let (verdict, witness) = if failures.is_empty() {
        (Verdict::Holds, "all checks pass".to_owned())
    } else {
        (Verdict::Fails, failures.join("; "))
    };
    HypothesisReport {
        condition: Condition::Solution,
        verdict,
        evidence: Evidence::Sampled,
        witness,
        values,
        limits: Vec::new(),
    }
}
