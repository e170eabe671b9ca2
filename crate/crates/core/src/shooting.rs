//! Shooting oracle: integrate u'''' = −f(t, max(u, 0)) forward from
//! (u, u', u'', u''')(0) = (a, 0, 0, b) with classic RK4 and solve the two
//! remaining conditions u'(1) = 0 and the nonlocal condition for (a, b).
//!
//! Nothing here goes through the Green's function; the module is an
//! independent check on [`crate::operator`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::operator::{corrected_edge, GridFunction};
use crate::problem::ProblemSpec;

pub const DEFAULT_STEPS: usize = 2000;
/// Lowest trajectory value still accepted as a positive solution.
pub const POSITIVITY_FLOOR: f64 = -1e-6;

/// A trajectory sampled at tᵢ = i/steps, each entry (u, u', u'', u''').
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingState {
    pub a: f64,
    pub b: f64,
    trajectory: Vec<[f64; 4]>,
}

fn rhs(f: &Expr, t: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
    let v = f.eval(t, y[0].max(0.0))?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            value: v,
            context: format!("in f at t = {t} during shooting"),
        });
    }
    Ok([y[1], y[2], y[3], -v])
}

fn axpy(y: &[f64; 4], h: f64, k: &[f64; 4]) -> [f64; 4] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

pub fn integrate_ivp(problem: &ProblemSpec, a: f64, b: f64, steps: usize) -> Result<ShootingState> {
    if steps == 0 {
        return Err(Error::Settings("shooting needs at least one step".into()));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite {
            value: if a.is_finite() { b } else { a },
            context: "in the shooting initial state".into(),
        });
    }
    let f = problem.f();
    let h = 1.0 / steps as f64;
    let mut y = [a, 0.0, 0.0, b];
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(y);
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = rhs(f, t, &y)?;
        let k2 = rhs(f, t + 0.5 * h, &axpy(&y, 0.5 * h, &k1))?;
        let k3 = rhs(f, t + 0.5 * h, &axpy(&y, 0.5 * h, &k2))?;
        let k4 = rhs(f, t + h, &axpy(&y, h, &k3))?;
        for c in 0..4 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        if let Some(v) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                value: *v,
                context: format!("in the shooting trajectory at t = {}", t + h),
            });
        }
        trajectory.push(y);
    }
    Ok(ShootingState { a, b, trajectory })
}

impl ShootingState {
    pub fn steps(&self) -> usize {
        self.trajectory.len() - 1
    }

    pub fn trajectory(&self) -> &[[f64; 4]] {
        &self.trajectory
    }

    /// State at t = 1.
    pub fn end(&self) -> [f64; 4] {
        self.trajectory[self.steps()]
    }

    /// u(t) by cubic Hermite interpolation of the stored (u, u') pairs.
    pub fn u_at(&self, t: f64) -> f64 {
        let m = self.steps();
        let h = 1.0 / m as f64;
        let t = t.clamp(0.0, 1.0);
        let i = ((t / h).floor() as usize).min(m - 1);
        let x = (t - i as f64 * h) / h;
        let (p, q) = (&self.trajectory[i], &self.trajectory[i + 1]);
        let x2 = x * x;
        let x3 = x2 * x;
        (2.0 * x3 - 3.0 * x2 + 1.0) * p[0]
            + (x3 - 2.0 * x2 + x) * h * p[1]
            + (-2.0 * x3 + 3.0 * x2) * q[0]
            + (x3 - x2) * h * q[1]
    }

    /// Composite Simpson over the trajectory nodes (the step count must be even).
    pub fn integral(&self) -> Result<f64> {
        let m = self.steps();
        if m % 2 != 0 {
            return Err(Error::Settings(format!(
                "Simpson integral needs an even step count, got {m}"
            )));
        }
        let u = |i: usize| self.trajectory[i][0];
        let mut acc = u(0) + u(m);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * u(i);
        }
        Ok(acc / (3.0 * m as f64))
    }

    pub fn min_u(&self) -> f64 {
        self.trajectory.iter().map(|y| y[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_u(&self) -> f64 {
        self.trajectory.iter().fold(0.0, |m, y| m.max(y[0].abs()))
    }

    /// Samples u on the uniform grid with `n` nodes.
    pub fn to_grid(&self, n: usize) -> Result<GridFunction> {
        GridFunction::from_fn(n, |t| self.u_at(t))
    }

    /// (u'(1), u(0) − α∫u − Σβᵢu(ηᵢ)).
    pub fn residual(&self, problem: &ProblemSpec) -> Result<[f64; 2]> {
        let nonlocal: f64 = problem.alpha() * self.integral()?
            + problem
                .betas()
                .iter()
                .zip(problem.etas())
                .map(|(b, &eta)| b * self.u_at(eta))
                .sum::<f64>();
        Ok([self.end()[1], self.a - nonlocal])
    }
}

pub fn shoot_residual(problem: &ProblemSpec, a: f64, b: f64) -> Result<[f64; 2]> {
    shoot_residual_with(problem, a, b, DEFAULT_STEPS)
}

pub fn shoot_residual_with(problem: &ProblemSpec, a: f64, b: f64, steps: usize) -> Result<[f64; 2]> {
    integrate_ivp(problem, a, b, steps)?.residual(problem)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingSettings {
    pub steps: usize,
    /// Target for ‖(r₁, r₂)‖∞.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ShootingSettings {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            tol: 1e-9,
            max_iter: 100,
        }
    }
}

impl ShootingSettings {
    fn validate(&self) -> Result<()> {
        if self.steps < 2 || self.steps % 2 != 0 {
            return Err(Error::Settings(format!(
                "shooting steps must be even and at least 2, got {}",
                self.steps
            )));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Settings("shooting tol and max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// A refined shooting root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingRoot {
    pub a: f64,
    pub b: f64,
    /// ‖(r₁, r₂)‖∞ at (a, b).
    pub residual: f64,
    pub sup_norm: f64,
    pub min_u: f64,
}

fn inf_norm(r: &[f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

fn fd_jacobian(
    eval: &impl Fn(f64, f64) -> Option<[f64; 2]>,
    x: [f64; 2],
    r: [f64; 2],
) -> Option<[[f64; 2]; 2]> {
    let mut j = [[0.0; 2]; 2];
    for c in 0..2 {
        let h = 1e-7 * x[c].abs().max(1.0);
        let mut xp = x;
        xp[c] += h;
        let rp = eval(xp[0], xp[1])?;
        j[0][c] = (rp[0] - r[0]) / h;
        j[1][c] = (rp[1] - r[1]) / h;
    }
    Some(j)
}

fn solve2(j: &[[f64; 2]; 2], r: &[f64; 2]) -> Option<[f64; 2]> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let scale = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(det.abs() > 1e-14 * scale * scale) {
        return None;
    }
    Some([
        -(j[1][1] * r[0] - j[0][1] * r[1]) / det,
        -(-j[1][0] * r[0] + j[0][0] * r[1]) / det,
    ])
}

/// Broyden's method with backtracking from (a, b). A finite-difference
/// Jacobian is used initially and again whenever the quasi-Newton step
/// fails to decrease the residual.
pub fn refine(
    problem: &ProblemSpec,
    a: f64,
    b: f64,
    settings: &ShootingSettings,
) -> Result<ShootingRoot> {
    settings.validate()?;
    let eval = |a: f64, b: f64| shoot_residual_with(problem, a, b, settings.steps).ok();
    let fail = |iterations, residual| Error::NoConvergence {
        iterations,
        residual,
    };
    let mut x = [a, b];
    let mut r = eval(a, b).ok_or_else(|| fail(0, f64::INFINITY))?;
    let mut jac = fd_jacobian(&eval, x, r).ok_or_else(|| fail(0, inf_norm(&r)))?;
    let mut fresh = true;
    for iteration in 0..settings.max_iter {
        let norm = inf_norm(&r);
        if norm < settings.tol {
            let state = integrate_ivp(problem, x[0], x[1], settings.steps)?;
            return Ok(ShootingRoot {
                a: x[0],
                b: x[1],
                residual: norm,
                sup_norm: state.max_abs_u(),
                min_u: state.min_u(),
            });
        }
        let step = solve2(&jac, &r);
        let mut accepted = None;
        if let Some(d) = step {
            let mut lambda = 1.0;
            for _ in 0..30 {
                let xt = [x[0] + lambda * d[0], x[1] + lambda * d[1]];
                if let Some(rt) = eval(xt[0], xt[1]) {
                    if inf_norm(&rt) < norm {
                        accepted = Some((xt, rt));
                        break;
                    }
                }
                lambda *= 0.5;
            }
        }
        match accepted {
            Some((xt, rt)) => {
                let s = [xt[0] - x[0], xt[1] - x[1]];
                let y = [rt[0] - r[0], rt[1] - r[1]];
                let ss = s[0] * s[0] + s[1] * s[1];
                if ss > 0.0 {
                    for row in 0..2 {
                        let js = jac[row][0] * s[0] + jac[row][1] * s[1];
                        for c in 0..2 {
                            jac[row][c] += (y[row] - js) * s[c] / ss;
                        }
                    }
                }
                x = xt;
                r = rt;
                fresh = false;
            }
            None if !fresh => {
                jac = fd_jacobian(&eval, x, r).ok_or_else(|| fail(iteration, norm))?;
                fresh = true;
            }
            None => return Err(fail(iteration, norm)),
        }
    }
    Err(fail(settings.max_iter, inf_norm(&r)))
}

fn same_root(p: &ShootingRoot, q: &ShootingRoot) -> bool {
    (p.a - q.a).abs() <= 1e-6 * (1.0 + p.a.abs().max(q.a.abs()))
        && (p.b - q.b).abs() <= 1e-6 * (1.0 + p.b.abs().max(q.b.abs()))
}

/// Appends `root` unless it duplicates one already present.
pub fn push_unique(roots: &mut Vec<ShootingRoot>, root: ShootingRoot) {
    if !roots.iter().any(|r| same_root(r, &root)) {
        roots.push(root);
    }
}

/// Nontrivial roots whose trajectories stay above [`POSITIVITY_FLOOR`].
pub fn is_positive_root(root: &ShootingRoot) -> bool {
    root.min_u >= POSITIVITY_FLOOR && root.sup_norm > 1e-9
}

/// Scans shoot_residual on a (grid+1)² vertex lattice over the given
/// ranges, refines every candidate cell from its center and returns the
/// distinct positive roots in row-major discovery order.
///
/// A cell is a candidate when both residual components change sign among
/// its corners, or when its mean corner norm is no larger than that of any
/// of its neighbours.
pub fn scan_and_refine(
    problem: &ProblemSpec,
    a_range: (f64, f64),
    b_range: (f64, f64),
    grid: usize,
    settings: &ShootingSettings,
) -> Result<Vec<ShootingRoot>> {
    settings.validate()?;
    let finite = [a_range.0, a_range.1, b_range.0, b_range.1];
    if finite.iter().any(|v| !v.is_finite()) || a_range.0 > a_range.1 || b_range.0 > b_range.1 {
        return Err(Error::Settings("scan ranges must be finite and ordered".into()));
    }
    if grid == 0 {
        return Err(Error::Settings("scan grid must have at least one cell".into()));
    }
    let m = grid + 1;
    let a_at = |i: usize| a_range.0 + (a_range.1 - a_range.0) * i as f64 / grid as f64;
    let b_at = |j: usize| b_range.0 + (b_range.1 - b_range.0) * j as f64 / grid as f64;
    let vertices: Vec<Option<[f64; 2]>> = (0..m * m)
        .into_par_iter()
        .map(|idx| shoot_residual_with(problem, a_at(idx / m), b_at(idx % m), settings.steps).ok())
        .collect();

    let corners = |i: usize, j: usize| {
        [
            vertices[i * m + j],
            vertices[(i + 1) * m + j],
            vertices[i * m + j + 1],
            vertices[(i + 1) * m + j + 1],
        ]
    };
    let cell_norm: Vec<f64> = (0..grid * grid)
        .map(|idx| {
            let cs = corners(idx / grid, idx % grid);
            if cs.iter().all(Option::is_some) {
                cs.iter().flatten().map(inf_norm).sum::<f64>() / 4.0
            } else {
                f64::INFINITY
            }
        })
        .collect();

    let mut candidates = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let cs = corners(i, j);
            if cs.iter().any(Option::is_none) {
                continue;
            }
            let changes = |c: usize| {
                let lo = cs.iter().flatten().any(|r| r[c] <= 0.0);
                let hi = cs.iter().flatten().any(|r| r[c] >= 0.0);
                lo && hi
            };
            let own = cell_norm[i * grid + j];
            let mut local_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ni < 0 || nj < 0 || ni >= grid as i64 || nj >= grid as i64 {
                        continue;
                    }
                    if cell_norm[ni as usize * grid + nj as usize] < own {
                        local_min = false;
                    }
                }
            }
            if (changes(0) && changes(1)) || local_min {
                candidates.push((
                    0.5 * (a_at(i) + a_at(i + 1)),
                    0.5 * (b_at(j) + b_at(j + 1)),
                ));
            }
        }
    }

    let refined: Vec<Option<ShootingRoot>> = candidates
        .par_iter()
        .map(|&(a, b)| refine(problem, a, b, settings).ok())
        .collect();
    let mut roots = Vec::new();
    for root in refined.into_iter().flatten() {
        if is_positive_root(&root) {
            push_unique(&mut roots, root);
        }
    }
    Ok(roots)
}

/// (u(0), u'''(0)) of a grid solution of `problem`.
///
/// The third derivative is the seven-point one-sided difference of fourth
/// order applied to u plus the particular integral of −f (see
/// [`corrected_edge`]), which removes the stencil's truncation error on
/// solutions with large higher derivatives.
pub fn params_from_grid(u: &GridFunction, problem: &ProblemSpec) -> Result<(f64, f64)> {
    const C: [f64; 7] = [-49.0 / 8.0, 29.0, -461.0 / 8.0, 62.0, -307.0 / 8.0, 13.0, -15.0 / 8.0];
    let v = u.values();
    let h = u.step();
    let density = (0..C.len())
        .map(|i| {
            let t = u.node(i);
            let y = problem.f().eval(t, v[i].max(0.0))?;
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::NonFinite {
                    value: y,
                    context: format!("in f at t = {t}"),
                })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let w: [f64; 7] = corrected_edge(v, &density, h);
    let d3 = C.iter().zip(&w).map(|(c, x)| c * x).sum::<f64>() / (h * h * h);
    Ok((v[0], d3))
}

/// max |u − v| / max(1, ‖u‖) with v the shooting trajectory sampled on u's grid.
pub fn agreement_error(u: &GridFunction, state: &ShootingState) -> f64 {
    let diff = u
        .nodes()
        .zip(u.values())
        .fold(0.0f64, |m, (t, x)| m.max((x - state.u_at(t)).abs()));
    diff / u.sup_norm().max(1.0)
}
