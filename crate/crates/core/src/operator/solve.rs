use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{check_grid_size, GridFunction};
use super::nystrom::NystromOperator;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Sup norm beyond which an iteration is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;
/// Maximum number of step halvings in the Newton line search.
pub const MAX_HALVINGS: usize = 30;
/// Newton gives up early when the residual has not dropped by 10% over this
/// many iterations.
pub const STAGNATION_WINDOW: usize = 50;
/// Grid used for the seed sweep in [`find_positive_solutions`].
pub const SWEEP_GRID: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Picard,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveSettings {
    pub grid_n: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Picard relaxation factor, or the initial Newton step length.
    pub damping: f64,
    pub method: Method,
}

impl SolveSettings {
    pub fn picard() -> Self {
        Self {
            grid_n: 401,
            tol: 1e-10,
            max_iter: 500,
            damping: 1.0,
            method: Method::Picard,
        }
    }

    pub fn newton() -> Self {
        Self {
            damping: 0.8,
            method: Method::Newton,
            ..Self::picard()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_grid_size(self.grid_n)?;
        if !(self.tol > 0.0) {
            return Err(Error::Settings(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Settings("max_iter must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Settings(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self::newton()
    }
}

/// A converged fixed point together with how it was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: GridFunction,
    pub iterations: usize,
    /// ‖u − Tu‖∞ at return.
    pub residual: f64,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_start(op: &NystromOperator, u0: &GridFunction) -> Result<()> {
    if u0.len() != op.n() {
        return Err(Error::Settings(format!(
            "initial guess has {} nodes, settings ask for {}",
            u0.len(),
            op.n()
        )));
    }
    Ok(())
}

/// u ← (1 − d)u + d·Tu until ‖u − Tu‖∞ ≤ tol.
pub fn picard_solve(
    problem: &ProblemSpec,
    settings: &SolveSettings,
    u0: &GridFunction,
) -> Result<Solution> {
    settings.validate()?;
    let op = NystromOperator::new(problem, settings.grid_n)?;
    picard_with(&op, settings, u0)
}

pub fn picard_with(
    op: &NystromOperator,
    settings: &SolveSettings,
    u0: &GridFunction,
) -> Result<Solution> {
    check_start(op, u0)?;
    let d = settings.damping;
    let mut u = u0.values().to_vec();
    let mut residual = f64::INFINITY;
    for iteration in 0..=settings.max_iter {
        let tu = match op.density(&u) {
            Ok(y) => op.solve_linear(&y),
            Err(Error::NonFinite { .. }) | Err(Error::Eval(_)) => {
                return Err(Error::Divergence {
                    iteration,
                    norm: sup(&u),
                })
            }
            Err(e) => return Err(e),
        };
        residual = u.iter().zip(&tu).fold(0.0, |m, (a, b)| m.max((a - b).abs()));
        if residual <= settings.tol {
            return Ok(Solution {
                u: GridFunction::new(u)?,
                iterations: iteration,
                residual,
            });
        }
        if iteration == settings.max_iter {
            break;
        }
        for (a, b) in u.iter_mut().zip(&tu) {
            *a = (1.0 - d) * *a + d * b;
        }
        let norm = sup(&u);
        if !(norm <= DIVERGENCE_NORM) {
            return Err(Error::Divergence {
                iteration: iteration + 1,
                norm,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: settings.max_iter,
        residual,
    })
}

/// Damped Newton on F(u) = u − Tu with Jacobian I − W·diag(∂f/∂u).
///
/// The first trial step has length `damping`; after an accepted step of
/// length λ the next trial starts at min(1, 2λ). Trial steps are halved
/// (at most [`MAX_HALVINGS`] times) until ‖F‖∞ decreases by the Armijo
/// factor 1 − 10⁻⁴λ. A run that stalls for [`STAGNATION_WINDOW`] iterations
/// ends with a no-convergence error before `max_iter`.
pub fn newton_solve(
    problem: &ProblemSpec,
    settings: &SolveSettings,
    u0: &GridFunction,
) -> Result<Solution> {
    settings.validate()?;
    let op = NystromOperator::new(problem, settings.grid_n)?;
    newton_with(&op, settings, u0)
}

pub fn newton_with(
    op: &NystromOperator,
    settings: &SolveSettings,
    u0: &GridFunction,
) -> Result<Solution> {
    newton_steps(op, settings, u0, 0)
}

/// Newton that takes at least `min_steps` steps before testing convergence.
fn newton_steps(
    op: &NystromOperator,
    settings: &SolveSettings,
    u0: &GridFunction,
    min_steps: usize,
) -> Result<Solution> {
    check_start(op, u0)?;
    let mut u = u0.values().to_vec();
    let mut f = op.residual(&u)?;
    let mut residual = sup(&f);
    let mut step = settings.damping;
    let mut history = Vec::with_capacity(settings.max_iter + 1);
    for iteration in 0..settings.max_iter {
        history.push(residual);
        if residual <= settings.tol && iteration >= min_steps {
            return Ok(Solution {
                u: GridFunction::new(u)?,
                iterations: iteration,
                residual,
            });
        }
        if iteration >= STAGNATION_WINDOW && residual > 0.9 * history[iteration - STAGNATION_WINDOW] {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual,
            });
        }
        let jac = op.jacobian(&u)?;
        let rhs = nalgebra::DVector::from_iterator(f.len(), f.iter().map(|v| -v));
        let dir = jac
            .lu()
            .solve(&rhs)
            .filter(|d| d.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularJacobian { iteration })?;

        let mut lambda = step;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(dir.iter()).map(|(a, d)| a + lambda * d).collect();
            if let Ok(ft) = op.residual(&trial) {
                let rt = sup(&ft);
                if rt <= (1.0 - 1e-4 * lambda) * residual || rt.max(residual) <= settings.tol {
                    accepted = Some((trial, ft, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, ft, rt)) = accepted else {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual,
            });
        };
        u = trial;
        f = ft;
        residual = rt;
        step = (2.0 * lambda).min(1.0);
        let norm = sup(&u);
        if !(norm <= DIVERGENCE_NORM) {
            return Err(Error::Divergence {
                iteration: iteration + 1,
                norm,
            });
        }
    }
    if residual <= settings.tol {
        return Ok(Solution {
            u: GridFunction::new(u)?,
            iterations: settings.max_iter,
            residual,
        });
    }
    Err(Error::NoConvergence {
        iterations: settings.max_iter,
        residual,
    })
}

pub fn solve(problem: &ProblemSpec, settings: &SolveSettings, u0: &GridFunction) -> Result<Solution> {
    match settings.method {
        Method::Picard => picard_solve(problem, settings, u0),
        Method::Newton => newton_solve(problem, settings, u0),
    }
}

/// Smallest sup norm a solution needs to count as nontrivial.
pub const POSITIVE_NORM_FLOOR: f64 = 1e-9;
/// Most negative nodal value tolerated in an accepted solution.
pub const NEGATIVITY_FLOOR: f64 = -1e-9;

/// `25` log-spaced constants in [1e−3, 50].
pub fn default_seeds() -> Vec<f64> {
    log_spaced(1e-3, 50.0, 25)
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Initial guesses tried for a seed value `c`: the constant c, then c times
/// the normalized solution of u'''' + 1 = 0 (a function inside the cone).
fn starts(op: &NystromOperator, seeds: &[f64]) -> Result<Vec<GridFunction>> {
    let n = op.n();
    let profile = op.solve_linear(&vec![1.0; n]);
    let peak = sup(&profile);
    let mut out = Vec::with_capacity(2 * seeds.len());
    for &c in seeds {
        out.push(GridFunction::constant(n, c)?);
        out.push(GridFunction::new(profile.iter().map(|p| c * p / peak).collect())?);
    }
    Ok(out)
}

/// Multi-start Newton search for distinct positive solutions, sorted by
/// sup norm. Failed starts are dropped; an empty result is valid.
///
/// When the requested grid is finer than [`SWEEP_GRID`], every start is
/// first run on that coarse grid; the distinct coarse roots are then
/// interpolated onto the requested grid and polished there by Newton.
pub fn find_positive_solutions(
    problem: &ProblemSpec,
    settings: &SolveSettings,
    seeds: &[f64],
) -> Result<Vec<Solution>> {
    settings.validate()?;
    if seeds.is_empty() {
        return Err(Error::Settings("at least one seed is required".into()));
    }
    let newton = SolveSettings {
        method: Method::Newton,
        ..*settings
    };
    let fine = NystromOperator::new(problem, settings.grid_n)?;
    let polished = if settings.grid_n > SWEEP_GRID {
        let coarse = NystromOperator::new(problem, SWEEP_GRID)?;
        let roots = dedupe(sweep(&coarse, &newton, seeds)?, |_| true);
        // Interpolated starts are close to a root; full steps remove the
        // interpolation error instead of leaving a damped fraction of it.
        let polish = SolveSettings {
            damping: 1.0,
            ..newton
        };
        let starts: Vec<GridFunction> = roots
            .iter()
            .map(|r| GridFunction::from_fn(settings.grid_n, |t| r.u.eval(t)))
            .collect::<Result<_>>()?;
        starts
            .par_iter()
            .map(|u0| newton_steps(&fine, &polish, u0, 1).ok())
            .collect()
    } else {
        sweep(&fine, &newton, seeds)?
    };
    let mut kept = dedupe(polished, |s| {
        s.u.min_value() >= NEGATIVITY_FLOOR && s.u.sup_norm() > POSITIVE_NORM_FLOOR
    });
    kept.sort_by(|a, b| a.u.sup_norm().total_cmp(&b.u.sup_norm()));
    Ok(kept)
}

fn sweep(op: &NystromOperator, settings: &SolveSettings, seeds: &[f64]) -> Result<Vec<Option<Solution>>> {
    let starts = starts(op, seeds)?;
    Ok(starts
        .par_iter()
        .map(|u0| newton_with(op, settings, u0).ok())
        .collect())
}

/// Keeps accepted solutions that differ from every earlier one by more than
/// 10⁻⁴(1 + larger sup norm), preserving order.
fn dedupe(found: Vec<Option<Solution>>, accept: impl Fn(&Solution) -> bool) -> Vec<Solution> {
    let mut kept: Vec<Solution> = Vec::new();
    for sol in found.into_iter().flatten() {
        if !accept(&sol) {
            continue;
        }
        let duplicate = kept.iter().any(|k| {
            let scale = 1.0 + k.u.sup_norm().max(sol.u.sup_norm());
            k.u.sup_distance(&sol.u) <= 1e-4 * scale
        });
        if !duplicate {
            kept.push(sol);
        }
    }
    kept
}
