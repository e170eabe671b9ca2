use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre4;

pub const MIN_GRID: usize = 11;

/// Values of a candidate solution on the uniform grid tᵢ = i/(n−1).
///
/// `n` is odd so that the node set carries composite Simpson panels.
/// Off-grid values come from piecewise cubic Hermite interpolation with
/// fourth-order finite-difference slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

pub(crate) fn check_grid_size(n: usize) -> Result<()> {
    if n < MIN_GRID || n % 2 == 0 {
        return Err(Error::Settings(format!(
            "grid size must be odd and at least {MIN_GRID}, got {n}"
        )));
    }
    Ok(())
}

/// wⱼ = uⱼ + (1/6)∫₀^{tⱼ} (tⱼ − s)³ p(s) ds for the first `W` nodes, where
/// p is the quadratic interpolant of the nodal density on each Simpson panel.
///
/// If u'''' = −f then w is a cubic near t = 0, so one-sided difference
/// stencils applied to w are exact. The added term vanishes with its first
/// three derivatives at t = 0, so such estimates stay consistent for any
/// smooth u.
pub fn corrected_edge<const W: usize>(u: &[f64], density: &[f64], h: f64) -> [f64; W] {
    let mut w = [0.0; W];
    for (j, wj) in w.iter_mut().enumerate() {
        let tj = j as f64 * h;
        let mut acc = 0.0;
        for k in 0..j {
            let panel = 2 * (k / 2);
            let mid = (panel + 1) as f64 * h;
            for (s, ws) in gauss_legendre4(k as f64 * h, (k + 1) as f64 * h) {
                let x = (s - mid) / h;
                let p = 0.5 * x * (x - 1.0) * density[panel]
                    + (1.0 - x * x) * density[panel + 1]
                    + 0.5 * x * (x + 1.0) * density[panel + 2];
                acc += ws * (tj - s).powi(3) * p;
            }
        }
        *wj = u[j] + acc / 6.0;
    }
    w
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid_size(values.len())?;
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                value: *v,
                context: format!("at grid node {i}"),
            });
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        check_grid_size(n)?;
        Self::new((0..n).map(|i| f(node(i, n))).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        node(i, self.len())
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.len();
        (0..n).map(move |i| node(i, n))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// ‖u‖ = max |uᵢ|.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// max |uᵢ − vᵢ|; both functions must share the grid.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.len(), other.len(), "grid functions on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Composite Simpson approximation of ∫₀¹ u.
    pub fn integral(&self) -> f64 {
        let n = self.len();
        let h = self.step();
        let mut acc = self.values[0] + self.values[n - 1];
        for i in 1..n - 1 {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * self.values[i];
        }
        acc * h / 3.0
    }

    /// Finite-difference slope at node `i`, fourth order everywhere.
    fn slope(&self, i: usize) -> f64 {
        let u = &self.values;
        let n = u.len();
        let h12 = 12.0 * self.step();
        if i == 0 {
            (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / h12
        } else if i == 1 {
            (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / h12
        } else if i == n - 1 {
            -(-25.0 * u[n - 1] + 48.0 * u[n - 2] - 36.0 * u[n - 3] + 16.0 * u[n - 4]
                - 3.0 * u[n - 5])
                / h12
        } else if i == n - 2 {
            -(-3.0 * u[n - 1] - 10.0 * u[n - 2] + 18.0 * u[n - 3] - 6.0 * u[n - 4] + u[n - 5])
                / h12
        } else {
            (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / h12
        }
    }

    /// Cubic Hermite interpolation at t ∈ [0, 1] (clamped).
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.len();
        let h = self.step();
        let t = t.clamp(0.0, 1.0);
        let i = ((t / h).floor() as usize).min(n - 2);
        let x = (t - self.node(i)) / h;
        if x == 0.0 {
            return self.values[i];
        }
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slope(i) * h, self.slope(i + 1) * h);
        let x2 = x * x;
        let x3 = x2 * x;
        (2.0 * x3 - 3.0 * x2 + 1.0) * y0
            + (x3 - 2.0 * x2 + x) * m0
            + (-2.0 * x3 + 3.0 * x2) * y1
            + (x3 - x2) * m1
    }
}

#[inline]
pub(crate) fn node(i: usize, n: usize) -> f64 {
    if i + 1 == n {
        1.0
    } else {
        i as f64 / (n - 1) as f64
    }
}
