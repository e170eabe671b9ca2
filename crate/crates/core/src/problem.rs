//! Boundary data and nonlinearity of
//!
//! ```text
//! u''''(t) + f(t, u(t)) = 0,  0 < t < 1,
//! u'(0) = u'(1) = u''(0) = 0,  u(0) = α ∫₀¹ u(s) ds + Σ βᵢ u(ηᵢ).
//! ```

use crate::error::{Error, Result};
use crate::expr::Expr;

/// A fully specified problem instance.
///
/// Construction only checks shape (equal lengths, finite numbers) so that
/// violating instances can still be inspected by the structural checker.
/// [`ProblemSpec::validate`] enforces (C2) and (C3).
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    alpha: f64,
    betas: Vec<f64>,
    etas: Vec<f64>,
    f: Expr,
}

impl ProblemSpec {
    pub fn new(alpha: f64, betas: Vec<f64>, etas: Vec<f64>, f: Expr) -> Result<Self> {
        if betas.len() != etas.len() {
            return Err(Error::Settings(format!(
                "beta has {} entries but eta has {}",
                betas.len(),
                etas.len()
            )));
        }
        for (name, v) in std::iter::once(("alpha", alpha))
            .chain(betas.iter().map(|&b| ("beta", b)))
            .chain(etas.iter().map(|&e| ("eta", e)))
        {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    value: v,
                    context: format!("in {name}"),
                });
            }
        }
        Ok(Self {
            alpha,
            betas,
            etas,
            f,
        })
    }

    /// Parses `f` and builds the problem in one step.
    pub fn parse(alpha: f64, betas: Vec<f64>, etas: Vec<f64>, f: &str) -> Result<Self> {
        Self::new(alpha, betas, etas, Expr::parse(f)?)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    /// Same boundary data, different nonlinearity.
    pub fn with_f(&self, f: Expr) -> Self {
        Self {
            f,
            ..self.clone()
        }
    }

    /// α + Σβᵢ
    pub fn nonlocal_mass(&self) -> f64 {
        self.alpha + self.betas.iter().sum::<f64>()
    }

    /// Checks (C2) and (C3).
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 0.0 {
            return Err(Error::Structural {
                condition: "C2",
                detail: format!("alpha = {} is negative", self.alpha),
            });
        }
        if let Some((i, b)) = self.betas.iter().enumerate().find(|(_, &b)| b < 0.0) {
            return Err(Error::Structural {
                condition: "C2",
                detail: format!("beta[{i}] = {b} is negative"),
            });
        }
        if let Some((i, e)) = self
            .etas
            .iter()
            .enumerate()
            .find(|(_, &e)| e <= 0.0 || e >= 1.0)
        {
            return Err(Error::Structural {
                condition: "C2",
                detail: format!("eta[{i}] = {e} is not in (0, 1)"),
            });
        }
        if let Some(i) = (1..self.etas.len()).find(|&i| self.etas[i] <= self.etas[i - 1]) {
            return Err(Error::Structural {
                condition: "C2",
                detail: format!(
                    "eta is not strictly increasing at index {i} ({} <= {})",
                    self.etas[i],
                    self.etas[i - 1]
                ),
            });
        }
        let mass = self.nonlocal_mass();
        if mass >= 1.0 {
            return Err(Error::Structural {
                condition: "C3",
                detail: format!("alpha + sum(beta) = {mass} is not < 1"),
            });
        }
        Ok(())
    }
}
