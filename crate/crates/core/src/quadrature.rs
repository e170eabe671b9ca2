//! Composite quadrature on bounded intervals with forced panel boundaries
//! ("seams") at points where an integrand changes its piecewise definition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Abscissae of the 4-point Gauss-Legendre rule on [-1, 1].
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_8,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    /// Composite Simpson; each panel holds two subintervals and three nodes.
    CompositeSimpson,
    /// Composite 4-point Gauss-Legendre; exact for degree 7 on each panel.
    CompositeGaussLegendre4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    kind: RuleKind,
    panels: usize,
    seams: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(kind: RuleKind, panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::Settings("quadrature needs at least one panel".into()));
        }
        Ok(Self {
            kind,
            panels,
            seams: Vec::new(),
        })
    }

    pub fn simpson(panels: usize) -> Result<Self> {
        Self::new(RuleKind::CompositeSimpson, panels)
    }

    pub fn gauss_legendre4(panels: usize) -> Result<Self> {
        Self::new(RuleKind::CompositeGaussLegendre4, panels)
    }

    /// Default rule for scalar constants: 64 Gauss-Legendre panels.
    pub fn default_constants() -> Self {
        Self {
            kind: RuleKind::CompositeGaussLegendre4,
            panels: 64,
            seams: Vec::new(),
        }
    }

    /// Adds forced panel boundaries. Seams must lie in (0, 1); duplicates
    /// are merged.
    pub fn with_seams(mut self, seams: &[f64]) -> Result<Self> {
        for &s in seams {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::Domain {
                    name: "seam",
                    value: s,
                    domain: "(0, 1)",
                });
            }
        }
        self.seams.extend_from_slice(seams);
        self.seams.sort_by(f64::total_cmp);
        self.seams.dedup();
        Ok(self)
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn seams(&self) -> &[f64] {
        &self.seams
    }

    /// Same rule with the panel count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            panels: self.panels * factor.max(1),
            ..self.clone()
        }
    }

    /// Splits [a, b] at the seams strictly inside it and assigns each piece
    /// a share of the panels proportional to its length (at least one).
    fn segments(&self, a: f64, b: f64) -> Vec<(f64, f64, usize)> {
        let mut cuts = vec![a];
        cuts.extend(self.seams.iter().copied().filter(|&s| s > a && s < b));
        cuts.push(b);
        let len = b - a;
        cuts.windows(2)
            .map(|w| {
                let share = (self.panels as f64 * (w[1] - w[0]) / len).round() as usize;
                (w[0], w[1], share.max(1))
            })
            .collect()
    }

    /// Nodes (ascending) and weights of the composite rule on [a, b].
    pub fn nodes_weights(&self, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        check_interval(a, b)?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        if a == b {
            return Ok((nodes, weights));
        }
        for (lo, hi, panels) in self.segments(a, b) {
            match self.kind {
                RuleKind::CompositeSimpson => {
                    let m = 2 * panels;
                    let h = (hi - lo) / m as f64;
                    for j in 0..=m {
                        let w = h / 3.0
                            * match j {
                                0 => 1.0,
                                j if j == m => 1.0,
                                j if j % 2 == 1 => 4.0,
                                _ => 2.0,
                            };
                        if j == 0 && !nodes.is_empty() {
                            // shared endpoint with the previous segment
                            *weights.last_mut().unwrap() += w;
                            continue;
                        }
                        nodes.push(if j == m { hi } else { lo + j as f64 * h });
                        weights.push(w);
                    }
                }
                RuleKind::CompositeGaussLegendre4 => {
                    let h = (hi - lo) / panels as f64;
                    for p in 0..panels {
                        let p0 = lo + p as f64 * h;
                        let p1 = if p + 1 == panels { hi } else { p0 + h };
                        for (x, w) in gauss_legendre4(p0, p1) {
                            nodes.push(x);
                            weights.push(w);
                        }
                    }
                }
            }
        }
        Ok((nodes, weights))
    }

    /// Approximates ∫ₐᵇ g.
    pub fn integrate<F>(&self, mut g: F, a: f64, b: f64) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        let (nodes, weights) = self.nodes_weights(a, b)?;
        let mut acc = 0.0;
        for (x, w) in nodes.into_iter().zip(weights) {
            let y = g(x);
            if !y.is_finite() {
                return Err(Error::NonFinite {
                    value: y,
                    context: format!("in the integrand at s = {x}"),
                });
            }
            acc += w * y;
        }
        Ok(acc)
    }
}

/// The 4-point Gauss-Legendre rule mapped onto [a, b].
pub fn gauss_legendre4(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL4_NODES
        .iter()
        .zip(GL4_WEIGHTS.iter())
        .map(move |(&x, &w)| (mid + half * x, half * w))
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite {
            value: if a.is_finite() { b } else { a },
            context: "in an integration bound".into(),
        });
    }
    if a > b {
        return Err(Error::Domain {
            name: "lower integration bound",
            value: a,
            domain: "(-inf, upper bound]",
        });
    }
    Ok(())
}
