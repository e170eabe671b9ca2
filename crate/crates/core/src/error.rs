use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// One of the structural conditions (C2)/(C3) on the boundary data fails.
    #[error("({condition}) violated: {detail}")]
    Structural {
        condition: &'static str,
        detail: String,
    },

    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("non-finite value {value} encountered {context}")]
    NonFinite { value: f64, context: String },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("iteration diverged at step {iteration}: sup norm {norm:e}")]
    Divergence { iteration: usize, norm: f64 },

    #[error("Newton Jacobian is singular at iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("invalid settings: {0}")]
    Settings(String),
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<f64> {
    if theta > 0.0 && theta < 0.5 {
        Ok(theta)
    } else {
        Err(Error::Domain {
            name: "theta",
            value: theta,
            domain: "(0, 1/2)",
        })
    }
}
