//! Closed-form Green's functions of the linear problem
//! `u'''' + y = 0` under the nonlocal boundary conditions, their bounding
//! functions, and the scalar constants that drive the cone estimates.

use serde::{Deserialize, Serialize};

use crate::error::{check_theta, check_unit, Result};
use crate::problem::ProblemSpec;
use crate::quadrature::QuadratureRule;

/// Default cone parameter.
pub const DEFAULT_THETA: f64 = 0.25;

/// k = 1 − (α + Σβᵢ). Fails with a structural error unless (C2) and (C3) hold.
pub fn compute_k(problem: &ProblemSpec) -> Result<f64> {
    problem.validate()?;
    Ok(1.0 - problem.nonlocal_mass())
}

/// G(t, s) of the two-point part, without domain checks.
#[inline]
pub(crate) fn g(t: f64, s: f64) -> f64 {
    let c = 1.0 - s;
    if s <= t {
        let d = t - s;
        (t * t * t * c * c - d * d * d) / 6.0
    } else {
        t * t * t * c * c / 6.0
    }
}

#[inline]
pub(crate) fn e(s: f64) -> f64 {
    let c = 1.0 - s;
    s * c * c / 6.0
}

#[inline]
pub(crate) fn int_g(s: f64) -> f64 {
    let c = 1.0 - s;
    s * c * c * (2.0 - s) / 24.0
}

pub fn green_g(t: f64, s: f64) -> Result<f64> {
    Ok(g(check_unit("t", t)?, check_unit("s", s)?))
}

/// e(s) = s(1−s)²/6, the upper bound of G(·, s).
pub fn e_bound(s: f64) -> Result<f64> {
    Ok(e(check_unit("s", s)?))
}

/// ρ(t) = min{t³, t²(1−t)}.
pub fn rho_bound(t: f64) -> Result<f64> {
    let t = check_unit("t", t)?;
    Ok(if t <= 0.5 { t * t * t } else { t * t * (1.0 - t) })
}

/// ∫₀¹ G(τ, s) dτ = s(1−s)²(2−s)/24.
pub fn integral_g_over_t(s: f64) -> Result<f64> {
    Ok(int_g(check_unit("s", s)?))
}

/// H(t, s) = G(t, s) + (α/k)∫₀¹G(τ, s)dτ + (1/k)Σβᵢ G(ηᵢ, s).
pub fn green_h(t: f64, s: f64, problem: &ProblemSpec) -> Result<f64> {
    let kernel = GreenKernel::new(problem)?;
    Ok(kernel.h(check_unit("t", t)?, check_unit("s", s)?))
}

/// The kernel H with the problem's nonlocal coefficients resolved once.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenKernel {
    k: f64,
    alpha_over_k: f64,
    beta_over_k: Vec<f64>,
    etas: Vec<f64>,
}

impl GreenKernel {
    pub fn new(problem: &ProblemSpec) -> Result<Self> {
        let k = compute_k(problem)?;
        Ok(Self {
            k,
            alpha_over_k: problem.alpha() / k,
            beta_over_k: problem.betas().iter().map(|b| b / k).collect(),
            etas: problem.etas().to_vec(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    /// The t-independent part of H: (α/k)∫₀¹G(τ, s)dτ + (1/k)Σβᵢ G(ηᵢ, s).
    #[inline]
    pub fn nonlocal_part(&self, s: f64) -> f64 {
        self.alpha_over_k * int_g(s)
            + self
                .beta_over_k
                .iter()
                .zip(&self.etas)
                .map(|(b, &eta)| b * g(eta, s))
                .sum::<f64>()
    }

    /// H(t, s); arguments are assumed to lie in [0, 1].
    #[inline]
    pub fn h(&self, t: f64, s: f64) -> f64 {
        g(t, s) + self.nonlocal_part(s)
    }

    /// (1 + α/k)e(s) + (1/k)Σβᵢ G(ηᵢ, s), the weight inside Ψ and the
    /// sup bound of H(·, s).
    #[inline]
    pub fn upper_weight(&self, s: f64) -> f64 {
        (1.0 + self.alpha_over_k) * e(s)
            + self
                .beta_over_k
                .iter()
                .zip(&self.etas)
                .map(|(b, &eta)| b * g(eta, s))
                .sum::<f64>()
    }
}

/// Ψ = θ⁶(1−2θ)² ∫_θ^{1−θ} [(1+α/k)e(s) + (1/k)Σβᵢ G(ηᵢ, s)] ds.
///
/// The rule gets extra seams at every ηᵢ.
pub fn psi_constant(problem: &ProblemSpec, theta: f64, quad: &QuadratureRule) -> Result<f64> {
    let theta = check_theta(theta)?;
    let kernel = GreenKernel::new(problem)?;
    let rule = quad.clone().with_seams(kernel.etas())?;
    let integral = rule.integrate(|s| kernel.upper_weight(s), theta, 1.0 - theta)?;
    let c = 1.0 - 2.0 * theta;
    Ok(theta.powi(6) * c * c * integral)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub k: f64,
    pub theta: f64,
    pub psi: f64,
    pub phi: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

pub fn constants_report(problem: &ProblemSpec, theta: f64) -> Result<ConstantsReport> {
    let k = compute_k(problem)?;
    let psi = psi_constant(problem, theta, &QuadratureRule::default_constants())?;
    let phi = 1.0 / (6.0 * k);
    Ok(ConstantsReport {
        k,
        theta,
        psi,
        phi,
        lambda1: 1.0 / phi,
        lambda2: 1.0 / psi,
    })
}
