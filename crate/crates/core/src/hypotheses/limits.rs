use serde::{Deserialize, Serialize};

use crate::problem::ProblemSpec;

/// The four limit functionals of f(t, u)/u.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Functional {
    /// lim_{u→0⁺} min_t f(t,u)/u
    #[serde(rename = "f0")]
    F0,
    /// lim_{u→0⁺} max_t f(t,u)/u
    #[serde(rename = "fsup0")]
    FSup0,
    /// lim_{u→∞} min_t f(t,u)/u
    #[serde(rename = "finf")]
    FInf,
    /// lim_{u→∞} max_t f(t,u)/u
    #[serde(rename = "fsupinf")]
    FSupInf,
}

impl Functional {
    pub const ALL: [Functional; 4] = [Self::F0, Self::FSup0, Self::FInf, Self::FSupInf];

    pub fn key(self) -> &'static str {
        match self {
            Self::F0 => "f0",
            Self::FSup0 => "fsup0",
            Self::FInf => "finf",
            Self::FSupInf => "fsupinf",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.key() == key)
    }

    pub fn at_zero(self) -> bool {
        matches!(self, Self::F0 | Self::FSup0)
    }

    pub fn uses_max(self) -> bool {
        matches!(self, Self::FSup0 | Self::FSupInf)
    }

    /// Exponents j of the sample points u = 10^j, ordered toward the limit.
    fn exponents(self) -> Vec<i32> {
        if self.at_zero() {
            (-8..=-1).rev().collect()
        } else {
            (0..=8).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Zero,
    Finite,
    #[serde(rename = "inf")]
    Infinite,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub functional: Functional,
    pub classification: Classification,
    /// (u, envelope) pairs ordered toward the limit, finite samples only.
    pub samples: Vec<(f64, f64)>,
    /// Fitted d log(envelope) / d log u over the samples nearest the limit.
    pub slope: Option<f64>,
    /// Sample points at which f could not be evaluated or overflowed.
    pub dropped: Vec<f64>,
}

impl LimitEstimate {
    pub fn flagged(&self) -> bool {
        !self.dropped.is_empty()
    }
}

pub const T_SAMPLES: usize = 101;
const FIT_POINTS: usize = 4;

fn envelope(problem: &ProblemSpec, functional: Functional, u: f64) -> Option<f64> {
    let mut acc = if functional.uses_max() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    for i in 0..T_SAMPLES {
        let t = i as f64 / (T_SAMPLES - 1) as f64;
        let v = problem.f().eval(t, u).ok()? / u;
        if !v.is_finite() {
            return None;
        }
        acc = if functional.uses_max() { acc.max(v) } else { acc.min(v) };
    }
    Some(acc)
}

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(_, v)| !(v > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Samples the envelope of f(t,u)/u at u = 10^j and classifies the limit.
///
/// With v₁, …, v₄ the envelope values nearest the limit (v₄ at the extreme
/// sample) and s the fitted log-log slope measured toward the limit:
/// * infinite: v strictly increasing and either v₄ > 10³ or s ≥ 1/2;
/// * zero: v non-increasing and either v₄ < 10⁻³ or s ≤ −1/2;
/// * finite: |s| < 0.05 and all vₖ within 5% of v₄;
/// * inconclusive otherwise, or with fewer than three usable samples.
pub fn estimate_limit(problem: &ProblemSpec, functional: Functional) -> LimitEstimate {
    let mut samples = Vec::new();
    let mut dropped = Vec::new();
    for j in functional.exponents() {
        let u = 10f64.powi(j);
        match envelope(problem, functional, u) {
            Some(v) => samples.push((u, v)),
            None => dropped.push(u),
        }
    }
    let tail = &samples[samples.len().saturating_sub(FIT_POINTS)..];
    // log u runs backwards when the limit is at zero.
    let slope = fit_slope(tail);
    let toward = slope.map(|s| if functional.at_zero() { -s } else { s });

    let classification = if tail.len() < 3 {
        Classification::Inconclusive
    } else {
        let extreme = tail[tail.len() - 1].1;
        let increasing = tail.windows(2).all(|w| w[1].1 > w[0].1);
        let non_increasing = tail.windows(2).all(|w| w[1].1 <= w[0].1);
        let steep = |sign: f64| toward.is_some_and(|s| sign * s >= 0.5);
        if increasing && (extreme > 1e3 || steep(1.0)) {
            Classification::Infinite
        } else if non_increasing && (extreme < 1e-3 || steep(-1.0)) {
            Classification::Zero
        } else if toward.is_some_and(|s| s.abs() < 0.05)
            && tail.iter().all(|&(_, v)| (v - extreme).abs() <= 0.05 * extreme.abs())
        {
            Classification::Finite
        } else {
            Classification::Inconclusive
        }
    };
    LimitEstimate {
        functional,
        classification,
        samples,
        slope,
        dropped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(f: &str) -> ProblemSpec {
        ProblemSpec::parse(0.0, vec![], vec![], f).unwrap()
    }

    #[test]
    fn linear_f_is_finite_everywhere() {
        for functional in Functional::ALL {
            let est = estimate_limit(&problem("u"), functional);
            assert_eq!(est.classification, Classification::Finite, "{functional:?}");
            assert!(est.slope.unwrap().abs() < 1e-12);
            assert!(!est.flagged());
        }
    }

    #[test]
    fn overflow_drops_samples() {
        let est = estimate_limit(&problem("exp(u)"), Functional::FInf);
        assert!(est.flagged());
        assert_eq!(est.samples.len(), 3);
        assert_eq!(est.classification, Classification::Infinite);
    }

    #[test]
    fn too_few_samples_is_inconclusive() {
        let est = estimate_limit(&problem("exp(u^2)"), Functional::FInf);
        assert_eq!(est.classification, Classification::Inconclusive);
    }

    #[test]
    fn keys_round_trip() {
        for functional in Functional::ALL {
            assert_eq!(Functional::from_key(functional.key()), Some(functional));
        }
        assert_eq!(Functional::from_key("f1"), None);
    }
}
