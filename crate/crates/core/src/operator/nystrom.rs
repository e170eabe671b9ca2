//! Nyström discretization of (Tu)(t) = ∫₀¹ H(t, s) f(s, u(s)) ds.
//!
//! Quadrature nodes coincide with the grid nodes. On every Simpson panel
//! [t₂ₚ, t₂ₚ₊₂] the density s ↦ f(s, u(s)) is replaced by its quadratic
//! interpolant, and the kernel against each Lagrange basis function is
//! integrated exactly (4-point Gauss-Legendre on pieces split at s = tᵢ and
//! s = ηₖ). With a smooth kernel this is composite Simpson; where the kernel
//! changes branch inside a panel the seam is integrated exactly.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::grid::{check_grid_size, node, GridFunction};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::kernel::{self, GreenKernel};
use crate::problem::ProblemSpec;
use crate::quadrature::gauss_legendre4;

#[derive(Debug, Clone)]
pub struct NystromOperator {
    n: usize,
    kernel: GreenKernel,
    weights: DMatrix<f64>,
    /// ∫ [(1+α/k)e(s) + (1/k)Σβᵢ G(ηᵢ, s)] Lⱼ(s) ds
    upper: Vec<f64>,
    f: Expr,
    df: Expr,
}

/// Quadratic Lagrange basis on a panel, local coordinate x ∈ [−1, 1].
#[inline]
fn basis(x: f64) -> [f64; 3] {
    [0.5 * x * (x - 1.0), 1.0 - x * x, 0.5 * x * (x + 1.0)]
}

/// ∫ g(s) Lⱼ(s) ds over every panel, with extra cuts at `cuts` inside panels.
fn product_weights(n: usize, cuts: &[f64], g: impl Fn(f64) -> f64) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    let mut w = vec![0.0; n];
    let mut pieces = Vec::with_capacity(cuts.len() + 2);
    for p in (0..n - 1).step_by(2) {
        let (a, mid, b) = (node(p, n), node(p + 1, n), node(p + 2, n));
        pieces.clear();
        pieces.push(a);
        pieces.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
        pieces.push(b);
        for piece in pieces.windows(2) {
            for (s, ws) in gauss_legendre4(piece[0], piece[1]) {
                let l = basis((s - mid) / h);
                let gs = g(s) * ws;
                w[p] += gs * l[0];
                w[p + 1] += gs * l[1];
                w[p + 2] += gs * l[2];
            }
        }
    }
    w
}

impl NystromOperator {
    pub fn new(problem: &ProblemSpec, n: usize) -> Result<Self> {
        check_grid_size(n)?;
        let kernel = GreenKernel::new(problem)?;
        let etas = kernel.etas().to_vec();
        let nonlocal = product_weights(n, &etas, |s| kernel.nonlocal_part(s));
        let upper = product_weights(n, &etas, |s| kernel.upper_weight(s));
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let t = node(i, n);
                let mut row = product_weights(n, &[t], |s| kernel::g(t, s));
                for (r, c) in row.iter_mut().zip(&nonlocal) {
                    *r += c;
                }
                row
            })
            .collect();
        let weights = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let f = problem.f().clone();
        let df = f.diff_u();
        Ok(Self {
            n,
            kernel,
            weights,
            upper,
            f,
            df,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kernel(&self) -> &GreenKernel {
        &self.kernel
    }

    /// Wᵢⱼ ≈ ∫ H(tᵢ, s) Lⱼ(s) ds.
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Weights of the sup bound ∫ [(1+α/k)e + (1/k)Σβᵢ G(ηᵢ, ·)] y.
    pub fn upper_weights(&self) -> &[f64] {
        &self.upper
    }

    /// Solution of the linear problem u'''' + y = 0 for nodal density y.
    pub fn solve_linear(&self, density: &[f64]) -> Vec<f64> {
        assert_eq!(density.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.weights
                    .row(i)
                    .iter()
                    .zip(density)
                    .map(|(w, y)| w * y)
                    .sum()
            })
            .collect()
    }

    /// f(tⱼ, max(uⱼ, 0)) at every node.
    pub fn density(&self, u: &[f64]) -> Result<Vec<f64>> {
        eval_nodal(&self.f, u)
    }

    /// ∂f/∂u(tⱼ, max(uⱼ, 0)) at every node.
    pub fn density_derivative(&self, u: &[f64]) -> Result<Vec<f64>> {
        eval_nodal(&self.df, u)
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check_len(u)?;
        let y = self.density(u.values())?;
        GridFunction::new(self.solve_linear(&y))
    }

    /// F(u) = u − Tu.
    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let y = self.density(u)?;
        let tu = self.solve_linear(&y);
        Ok(u.iter().zip(tu).map(|(a, b)| a - b).collect())
    }

    /// I − W diag(∂f/∂u).
    pub fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let dy = self.density_derivative(u)?;
        let n = self.n;
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let v = -self.weights[(i, j)] * dy[j];
            if i == j {
                1.0 + v
            } else {
                v
            }
        }))
    }

    fn check_len(&self, u: &GridFunction) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::Settings(format!(
                "grid function has {} nodes, operator has {}",
                u.len(),
                self.n
            )));
        }
        Ok(())
    }
}

fn eval_nodal(f: &Expr, u: &[f64]) -> Result<Vec<f64>> {
    let n = u.len();
    u.iter()
        .enumerate()
        .map(|(j, &uj)| {
            let t = node(j, n);
            let v = f.eval(t, uj.max(0.0))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite {
                    value: v,
                    context: format!("in f at (t, u) = ({t}, {uj})"),
                })
            }
        })
        .collect()
}

/// (Tu)(tᵢ) on u's own grid.
pub fn apply_t(u: &GridFunction, problem: &ProblemSpec) -> Result<GridFunction> {
    NystromOperator::new(problem, u.len())?.apply(u)
}
