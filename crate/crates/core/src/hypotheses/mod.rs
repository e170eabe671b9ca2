//! Checks of the structural conditions, the growth hypotheses, cone
//! membership and solution quality.
//!
//! Every check produces a [`HypothesisReport`]. Exact checks (C2, C3) are
//! decided in floating point; everything else is decided on samples and the
//! report says so in its [`Evidence`].

mod limits;
mod verify;

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{check_theta, Result};
use crate::kernel::{self, compute_k};
use crate::operator::GridFunction;
use crate::problem::ProblemSpec;
use crate::quadrature::QuadratureRule;

pub use limits::{estimate_limit, Classification, Functional, LimitEstimate, T_SAMPLES};
pub use verify::{verify_solution, verify_with, VerifyThresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    Cone,
    Solution,
}

impl Condition {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.trim().to_ascii_uppercase().as_str() {
            "C1" => Self::C1,
            "C2" => Self::C2,
            "C3" => Self::C3,
            "H1" => Self::H1,
            "H2" => Self::H2,
            "H3" => Self::H3,
            "H4" => Self::H4,
            "H5" => Self::H5,
            "H6" => Self::H6,
            _ => return None,
        })
    }

    /// The two limits a growth hypothesis asks for, if it is one.
    pub fn required_limits(self) -> Option<[(Functional, Classification); 2]> {
        use Classification::{Infinite, Zero};
        use Functional::*;
        Some(match self {
            Self::H1 => [(F0, Infinite), (FSupInf, Zero)],
            Self::H2 => [(FSup0, Zero), (FInf, Infinite)],
            Self::H3 => [(F0, Infinite), (FInf, Infinite)],
            Self::H5 => [(FSup0, Zero), (FSupInf, Zero)],
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    HoldsDeclared,
    Fails,
    Advisory,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Self::Holds => "holds",
            Self::HoldsDeclared => "holds (declared)",
            Self::Fails => "fails",
            Self::Advisory => "advisory",
        }
    }

    pub fn passes(self) -> bool {
        matches!(self, Self::Holds | Self::HoldsDeclared)
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Exact,
    Sampled,
    Declared,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub witness: String,
    /// Named numbers backing the verdict (sampled extrema, thresholds, …).
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub limits: Vec<LimitEstimate>,
}

impl HypothesisReport {
    fn new(condition: Condition, verdict: Verdict, evidence: Evidence, witness: String) -> Self {
        Self {
            condition,
            verdict,
            evidence,
            witness,
            values: BTreeMap::new(),
            limits: Vec::new(),
        }
    }

    fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_owned(), v);
        self
    }
}

/// Limits the user asserts instead of having them sampled.
pub type DeclaredLimits = BTreeMap<Functional, Classification>;

const C1_GRID: usize = 101;
const C1_U_MAX: f64 = 100.0;

/// (C1) by sampling, (C2) and (C3) exactly.
pub fn check_structural(problem: &ProblemSpec) -> Vec<HypothesisReport> {
    vec![check_c1(problem), check_c2(problem), check_c3(problem)]
}

fn check_c1(problem: &ProblemSpec) -> HypothesisReport {
    let mut worst: Option<(f64, f64, String)> = None;
    'scan: for i in 0..C1_GRID {
        let t = i as f64 / (C1_GRID - 1) as f64;
        for j in 0..C1_GRID {
            let u = C1_U_MAX * j as f64 / (C1_GRID - 1) as f64;
            let bad = match problem.f().eval(t, u) {
                Ok(v) if v.is_finite() && v >= 0.0 => None,
                Ok(v) => Some(format!("f({t}, {u}) = {v}")),
                Err(e) => Some(format!("f({t}, {u}) undefined: {e}")),
            };
            if let Some(msg) = bad {
                worst = Some((t, u, msg));
                break 'scan;
            }
        }
    }
    match worst {
        None => HypothesisReport::new(
            Condition::C1,
            Verdict::Holds,
            Evidence::Sampled,
            format!("f finite and nonnegative on a {C1_GRID}x{C1_GRID} grid of [0,1]x[0,{C1_U_MAX}]"),
        ),
        Some((t, u, msg)) => HypothesisReport::new(Condition::C1, Verdict::Advisory, Evidence::Sampled, msg)
            .value("t", t)
            .value("u", u),
    }
}

fn check_c2(problem: &ProblemSpec) -> HypothesisReport {
    let mut problems = Vec::new();
    if !(problem.alpha() >= 0.0) {
        problems.push(format!("alpha = {} < 0", problem.alpha()));
    }
    for (i, b) in problem.betas().iter().enumerate() {
        if !(*b >= 0.0) {
            problems.push(format!("beta[{i}] = {b} < 0"));
        }
    }
    for (i, e) in problem.etas().iter().enumerate() {
        if !(*e > 0.0 && *e < 1.0) {
            problems.push(format!("eta[{i}] = {e} outside (0, 1)"));
        }
    }
    for (i, w) in problem.etas().windows(2).enumerate() {
        if !(w[0] < w[1]) {
            problems.push(format!("eta[{i}] = {} is not below eta[{}] = {}", w[0], i + 1, w[1]));
        }
    }
    if problems.is_empty() {
        HypothesisReport::new(
            Condition::C2,
            Verdict::Holds,
            Evidence::Exact,
            "alpha, beta >= 0 and 0 < eta_1 < ... < eta_n < 1".into(),
        )
    } else {
        HypothesisReport::new(Condition::C2, Verdict::Fails, Evidence::Exact, problems.join("; "))
    }
}

fn check_c3(problem: &ProblemSpec) -> HypothesisReport {
    let mass = problem.nonlocal_mass();
    let verdict = if mass < 1.0 { Verdict::Holds } else { Verdict::Fails };
    HypothesisReport::new(
        Condition::C3,
        verdict,
        Evidence::Exact,
        format!("alpha + sum(beta) = {mass}, k = {}", 1.0 - mass),
    )
    .value("sum", mass)
    .value("k", 1.0 - mass)
}

/// Composes two limit classifications into a verdict on H1, H2, H3 or H5.
/// Declared limits replace the sampled estimate for their functional.
pub fn check_growth(
    problem: &ProblemSpec,
    condition: Condition,
    declared: &DeclaredLimits,
) -> HypothesisReport {
    let required = condition
        .required_limits()
        .expect("check_growth takes H1, H2, H3 or H5");
    let mut matched = 0;
    let mut any_declared = false;
    let mut estimates = Vec::new();
    let mut parts = Vec::new();
    for (functional, want) in required {
        let (got, source) = match declared.get(&functional) {
            Some(c) => {
                any_declared = true;
                (*c, "declared")
            }
            None => {
                let est = estimate_limit(problem, functional);
                let c = est.classification;
                estimates.push(est);
                (c, "sampled")
            }
        };
        if got == want {
            matched += 1;
        }
        parts.push(format!(
            "{} = {} ({source}, required {})",
            functional.key(),
            class_label(got),
            class_label(want)
        ));
    }
    let (verdict, evidence) = match (matched == 2, any_declared) {
        (true, false) => (Verdict::Holds, Evidence::Sampled),
        (true, true) => (Verdict::HoldsDeclared, Evidence::Declared),
        (false, d) => (
            Verdict::Advisory,
            if d { Evidence::Declared } else { Evidence::Sampled },
        ),
    };
    let mut report = HypothesisReport::new(condition, verdict, evidence, parts.join("; "));
    report.limits = estimates;
    report
}

fn class_label(c: Classification) -> &'static str {
    match c {
        Classification::Zero => "0",
        Classification::Finite => "finite",
        Classification::Infinite => "inf",
        Classification::Inconclusive => "inconclusive",
    }
}

/// H1, H2, H3 and H5 in that order.
#[allow(non_snake_case)]
pub fn check_H1_H2_H3_H5(problem: &ProblemSpec, declared: &DeclaredLimits) -> Vec<HypothesisReport> {
    [Condition::H1, Condition::H2, Condition::H3, Condition::H5]
        .into_iter()
        .map(|c| check_growth(problem, c, declared))
        .collect()
}

pub const REGION_GRID: usize = 201;
/// Relative slack when comparing a user M with Λ₁ or Λ₂.
const CONSTANT_SLACK: f64 = 1e-12;

/// The u samples of the (H4) region (0, ρ]: 100 log-spaced points in
/// [10⁻⁸ρ, 10⁻²ρ) followed by 101 uniform points in [10⁻²ρ, ρ].
pub fn h4_u_samples(rho: f64) -> Vec<f64> {
    let mut u: Vec<f64> = (0..100)
        .map(|i| rho * 10f64.powf(-8.0 + 6.0 * i as f64 / 100.0))
        .collect();
    u.extend((0..=100).map(|i| rho * (1e-2 + (1.0 - 1e-2) * i as f64 / 100.0)));
    u
}

fn region_sample(
    problem: &ProblemSpec,
    ts: &[f64],
    us: &[f64],
) -> std::result::Result<[(f64, f64, f64); 2], (f64, f64, String)> {
    let mut lo = (f64::NAN, f64::NAN, f64::INFINITY);
    let mut hi = (f64::NAN, f64::NAN, f64::NEG_INFINITY);
    for &t in ts {
        for &u in us {
            let v = match problem.f().eval(t, u) {
                Ok(v) if v.is_finite() => v,
                Ok(v) => return Err((t, u, format!("f({t}, {u}) = {v}"))),
                Err(e) => return Err((t, u, format!("f({t}, {u}) undefined: {e}"))),
            };
            if v < lo.2 {
                lo = (t, u, v);
            }
            if v > hi.2 {
                hi = (t, u, v);
            }
        }
    }
    Ok([lo, hi])
}

fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// (H4): f(t, u) ≤ M₁ρ₁ on [0,1]×(0,ρ₁], with M₁ ∈ (0, Λ₁].
#[allow(non_snake_case)]
pub fn check_H4(problem: &ProblemSpec, theta: f64, rho1: f64, m1: f64) -> Result<HypothesisReport> {
    check_theta(theta)?;
    let lambda1 = 6.0 * compute_k(problem)?;
    let ts = uniform(0.0, 1.0, REGION_GRID);
    let us = h4_u_samples(rho1);
    Ok(region_report(
        problem,
        Condition::H4,
        &ts,
        &us,
        m1 * rho1,
        true,
        m1 > 0.0 && m1 <= lambda1 * (1.0 + CONSTANT_SLACK),
        format!("M1 = {m1} outside (0, Lambda1 = {lambda1}]"),
    )
    .value("rho1", rho1)
    .value("M1", m1)
    .value("lambda1", lambda1))
}

/// (H6): f(t, u) ≥ M₂ρ₂ on [θ,1−θ]×[θ³(1−2θ)ρ₂, ρ₂], with M₂ ≥ Λ₂.
#[allow(non_snake_case)]
pub fn check_H6(problem: &ProblemSpec, theta: f64, rho2: f64, m2: f64) -> Result<HypothesisReport> {
    let lambda2 = 1.0 / kernel::psi_constant(problem, theta, &QuadratureRule::default_constants())?;
    let ts = uniform(theta, 1.0 - theta, REGION_GRID);
    let lower = theta.powi(3) * (1.0 - 2.0 * theta) * rho2;
    let us = uniform(lower, rho2, REGION_GRID);
    Ok(region_report(
        problem,
        Condition::H6,
        &ts,
        &us,
        m2 * rho2,
        false,
        m2 >= lambda2 * (1.0 - CONSTANT_SLACK),
        format!("M2 = {m2} below Lambda2 = {lambda2}"),
    )
    .value("rho2", rho2)
    .value("M2", m2)
    .value("lambda2", lambda2)
    .value("u_lower", lower))
}

#[allow(clippy::too_many_arguments)]
fn region_report(
    problem: &ProblemSpec,
    condition: Condition,
    ts: &[f64],
    us: &[f64],
    bound: f64,
    upper: bool,
    m_in_range: bool,
    range_note: String,
) -> HypothesisReport {
    let grid = format!("{}x{} grid", ts.len(), us.len());
    let [lo, hi] = match region_sample(problem, ts, us) {
        Ok(extrema) => extrema,
        Err((t, u, msg)) => {
            return HypothesisReport::new(condition, Verdict::Fails, Evidence::Sampled, msg)
                .value("t", t)
                .value("u", u)
                .value("bound", bound)
        }
    };
    let (t, u, v) = if upper { hi } else { lo };
    let ok = if upper { v <= bound } else { v >= bound };
    let (name, rel) = if upper { ("sup", "<=") } else { ("inf", ">=") };
    let verdict = match (ok, m_in_range) {
        (false, _) => Verdict::Fails,
        (true, true) => Verdict::Holds,
        (true, false) => Verdict::Advisory,
    };
    let mut witness = if ok {
        format!("sampled {name} f = {v} {rel} {bound} on a {grid}")
    } else {
        format!("f({t}, {u}) = {v} violates f {rel} {bound}")
    };
    if !m_in_range {
        witness.push_str("; ");
        witness.push_str(&range_note);
    }
    HypothesisReport::new(condition, verdict, Evidence::Sampled, witness)
        .value(name, v)
        .value("t", t)
        .value("u", u)
        .value("bound", bound)
}

/// min over [θ, 1−θ] of u against θ³(1−2θ)‖u‖, with slack 10⁻⁹.
pub fn cone_check(u: &GridFunction, theta: f64) -> Result<HypothesisReport> {
    check_theta(theta)?;
    let (lo, hi) = (theta, 1.0 - theta);
    let inner = u
        .nodes()
        .zip(u.values())
        .filter(|(t, _)| *t >= lo && *t <= hi)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    let min = inner.min(u.eval(lo)).min(u.eval(hi));
    let gamma = theta.powi(3) * (1.0 - 2.0 * theta);
    let bound = gamma * u.sup_norm();
    let verdict = if min >= bound - 1e-9 {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(HypothesisReport::new(
        Condition::Cone,
        verdict,
        Evidence::Sampled,
        format!("min on [{lo}, {hi}] = {min}, theta^3(1-2theta)||u|| = {bound}"),
    )
    .value("min", min)
    .value("bound", bound)
    .value("sup_norm", u.sup_norm()))
}
