#![allow(dead_code)]

use bvp4_core::ProblemSpec;

pub fn ex51() -> ProblemSpec {
    ProblemSpec::parse(
        1.0 / 3.0,
        vec![1.0 / 7.0, 1.0 / 4.0, 3.0 / 84.0],
        vec![7.0 / 15.0, 2.0 / 3.0, 11.0 / 13.0],
        "t + abs(cos(u))",
    )
    .unwrap()
}

pub fn ex52() -> ProblemSpec {
    ProblemSpec::parse(
        0.25,
        vec![1.0 / 12.0, 1.0 / 6.0],
        vec![1.0 / 8.0, 1.0 / 4.0],
        "u^2 * exp(u) * ln(1 + t + u)",
    )
    .unwrap()
}

pub fn ex53() -> ProblemSpec {
    ProblemSpec::parse(
        1.0 / 30.0,
        vec![1.0 / 60.0, 1.0 / 120.0, 1.0 / 240.0],
        vec![0.25, 1.0 / 3.0, 0.5],
        "(1+t)*exp(u)",
    )
    .unwrap()
}

pub fn ex54() -> ProblemSpec {
    ProblemSpec::parse(0.1, vec![0.05], vec![0.5], "6528e9 * u^2 * exp(1-u)").unwrap()
}

pub fn examples() -> Vec<ProblemSpec> {
    vec![ex51(), ex52(), ex53(), ex54()]
}

pub fn with_f(p: &ProblemSpec, f: &str) -> ProblemSpec {
    ProblemSpec::parse(p.alpha(), p.betas().to_vec(), p.etas().to_vec(), f).unwrap()
}

/// Exact solution of u'''' = −(c₀ + c₁t + c₂t² + c₃t³) under the boundary
/// conditions of `p`, written as u = A + Bt³ − P(t) with
/// P(t) = Σ c_j j! t^{j+4} / (j+4)!.
pub struct CubicLoadSolution {
    pub a: f64,
    pub b: f64,
    pub c: [f64; 4],
}

impl CubicLoadSolution {
    pub fn new(p: &ProblemSpec, c: [f64; 4]) -> Self {
        let fact = [1.0, 1.0, 2.0, 6.0];
        let big = |j: usize| (1..=j + 4).map(|i| i as f64).product::<f64>();
        let pcoef: Vec<f64> = (0..4).map(|j| c[j] * fact[j] / big(j)).collect();
        let p_at = |t: f64| (0..4).map(|j| pcoef[j] * t.powi(j as i32 + 4)).sum::<f64>();
        let dp1: f64 = (0..4).map(|j| pcoef[j] * (j + 4) as f64).sum();
        let int_p: f64 = (0..4).map(|j| pcoef[j] / (j + 5) as f64).sum();
        let b = dp1 / 3.0;
        let k = 1.0 - p.nonlocal_mass();
        let rhs = p.alpha() * (b / 4.0 - int_p)
            + p.betas()
                .iter()
                .zip(p.etas())
                .map(|(beta, &eta)| beta * (b * eta.powi(3) - p_at(eta)))
                .sum::<f64>();
        Self { a: rhs / k, b, c }
    }

    pub fn load(&self, t: f64) -> f64 {
        self.c[0] + self.c[1] * t + self.c[2] * t * t + self.c[3] * t.powi(3)
    }

    pub fn u(&self, t: f64) -> f64 {
        let fact = [1.0, 1.0, 2.0, 6.0];
        let big = |j: usize| (1..=j + 4).map(|i| i as f64).product::<f64>();
        let p: f64 = (0..4)
            .map(|j| self.c[j] * fact[j] / big(j) * t.powi(j as i32 + 4))
            .sum();
        self.a + self.b * t.powi(3) - p
    }
}

/// u(t) = −t⁴/24 + t³/18 + C₄ for the load y ≡ 1.
pub fn unit_load_c4(p: &ProblemSpec) -> f64 {
    let k = 1.0 - p.nonlocal_mass();
    let tail: f64 = p
        .betas()
        .iter()
        .zip(p.etas())
        .map(|(b, &e)| b * (-e.powi(4) / 24.0 + e.powi(3) / 18.0))
        .sum();
    (p.alpha() / 180.0 + tail) / k
}

pub fn unit_load_u(p: &ProblemSpec, t: f64) -> f64 {
    -t.powi(4) / 24.0 + t.powi(3) / 18.0 + unit_load_c4(p)
}
