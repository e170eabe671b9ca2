//! Solver and verifier for the fourth-order nonlocal boundary value problem
//!
//! ```text
//! u''''(t) + f(t, u(t)) = 0,  0 < t < 1,
//! u'(0) = u'(1) = u''(0) = 0,  u(0) = α ∫₀¹ u(s) ds + Σ βᵢ u(ηᵢ).
//! ```
//!
//! * [`kernel`]: Green's functions G and H, bounds e and ρ, constants k, Ψ, Φ, Λ₁, Λ₂.
//! * [`quadrature`]: composite Simpson / Gauss-Legendre rules with seams.
//! * [`expr`]: parser, evaluator and u-derivative of f(t, u).
//! * [`operator`]: Nyström discretization of the Hammerstein operator, Picard and Newton solvers.
//! * [`shooting`]: independent RK4 shooting oracle.
//! * [`hypotheses`]: checks of (C1)–(C3), (H1)–(H6), cone membership and solution verification.

pub mod error;
pub mod expr;
pub mod hypotheses;
pub mod kernel;
pub mod operator;
pub mod problem;
pub mod quadrature;
pub mod shooting;

pub use error::{Error, Result};
pub use expr::Expr;
pub use problem::ProblemSpec;
