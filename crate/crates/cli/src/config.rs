//! JSON problem configuration.

use std::collections::BTreeMap;
use std::path::Path;

use bvp4_core::hypotheses::{Classification, DeclaredLimits, Functional};
use bvp4_core::kernel::DEFAULT_THETA;
use bvp4_core::operator::{default_seeds, Method, SolveSettings};
use bvp4_core::{Error as CoreError, Expr, ProblemSpec};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config key \"{key}\": {message}")]
    Key { key: String, message: String },
    #[error(transparent)]
    Problem(#[from] CoreError),
}

impl ConfigError {
    fn key(key: &str, message: impl Into<String>) -> Self {
        Self::Key {
            key: key.to_owned(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub damping: Option<f64>,
    pub method: Option<Method>,
    pub seeds: Option<Vec<f64>>,
}

/// Window and resolution of the shooting scan.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub grid: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            a_range: (0.0, 50.0),
            b_range: (-200.0, 200.0),
            grid: 80,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub f: String,
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub eta: Vec<f64>,
    pub theta: Option<f64>,
    #[serde(default)]
    pub limits: BTreeMap<String, String>,
    #[serde(default)]
    pub solver: SolverConfig,
    pub scan: Option<ScanConfig>,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        if config.beta.len() != config.eta.len() {
            return Err(ConfigError::key(
                "eta",
                format!("has {} entries but beta has {}", config.eta.len(), config.beta.len()),
            ));
        }
        Expr::parse(&config.f).map_err(|e| ConfigError::key("f", e.to_string()))?;
        if let Some(theta) = config.theta {
            if !(theta > 0.0 && theta < 0.5) {
                return Err(ConfigError::key("theta", format!("{theta} is not in (0, 1/2)")));
            }
        }
        config.declared_limits()?;
        config.solve_settings(None)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// The boundary value problem, without the structural checks.
    pub fn problem_unchecked(&self) -> Result<ProblemSpec, ConfigError> {
        ProblemSpec::parse(self.alpha, self.beta.clone(), self.eta.clone(), &self.f).map_err(|e| match e {
            CoreError::Parse(p) => ConfigError::key("f", p.to_string()),
            other => ConfigError::Problem(other),
        })
    }

    /// The boundary value problem after (C2) and (C3) have been checked.
    pub fn problem(&self) -> Result<ProblemSpec, ConfigError> {
        let p = self.problem_unchecked()?;
        p.validate()?;
        Ok(p)
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or(DEFAULT_THETA)
    }

    pub fn declared_limits(&self) -> Result<DeclaredLimits, ConfigError> {
        let mut out = DeclaredLimits::new();
        for (key, value) in &self.limits {
            let functional = Functional::from_key(key)
                .ok_or_else(|| ConfigError::key(&format!("limits.{key}"), "expected f0, fsup0, finf or fsupinf"))?;
            let class = match value.as_str() {
                "zero" => Classification::Zero,
                "finite" => Classification::Finite,
                "inf" => Classification::Infinite,
                other => {
                    return Err(ConfigError::key(
                        &format!("limits.{key}"),
                        format!("{other:?} is not one of \"zero\", \"finite\", \"inf\""),
                    ))
                }
            };
            out.insert(functional, class);
        }
        Ok(out)
    }

    /// Solver settings from the config, with `method` overriding the
    /// configured method. Unset fields take the method's defaults.
    pub fn solve_settings(&self, method: Option<Method>) -> Result<SolveSettings, ConfigError> {
        let s = &self.solver;
        let base = match method.or(s.method).unwrap_or(Method::Picard) {
            Method::Picard => SolveSettings::picard(),
            Method::Newton => SolveSettings::newton(),
        };
        let settings = SolveSettings {
            grid_n: s.grid_n.unwrap_or(base.grid_n),
            tol: s.tol.unwrap_or(base.tol),
            max_iter: s.max_iter.unwrap_or(base.max_iter),
            damping: s.damping.unwrap_or(base.damping),
            ..base
        };
        settings
            .validate()
            .map_err(|e| ConfigError::key("solver", e.to_string()))?;
        Ok(settings)
    }

    pub fn seeds(&self) -> Result<Vec<f64>, ConfigError> {
        match &self.solver.seeds {
            None => Ok(default_seeds()),
            Some(v) if v.is_empty() => Err(ConfigError::key("solver.seeds", "must not be empty")),
            Some(v) if v.iter().any(|s| !(*s > 0.0 && s.is_finite())) => {
                Err(ConfigError::key("solver.seeds", "seeds must be positive"))
            }
            Some(v) => Ok(v.clone()),
        }
    }

    pub fn scan(&self) -> ScanConfig {
        self.scan.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"f": "u", "alpha": 0.1, "beta": [0.2], "eta": [0.5]}"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ProblemConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.theta(), 0.25);
        assert_eq!(c.solve_settings(None).unwrap(), SolveSettings::picard());
        assert_eq!(c.solve_settings(Some(Method::Newton)).unwrap(), SolveSettings::newton());
        assert_eq!(c.seeds().unwrap(), default_seeds());
        assert_eq!(c.scan(), ScanConfig::default());
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            (r#"{"f": "u +", "alpha": 0.1, "beta": [0.2], "eta": [0.5]}"#, "\"f\""),
            (r#"{"f": "u", "alpha": 0.1, "beta": [0.2], "eta": []}"#, "\"eta\""),
            (r#"{"f": "u", "alpha": 0.1, "beta": [], "eta": [], "theta": 0.5}"#, "\"theta\""),
            (r#"{"f": "u", "alpha": 0.1, "beta": [], "eta": [], "limits": {"f1": "inf"}}"#, "limits.f1"),
            (r#"{"f": "u", "alpha": 0.1, "beta": [], "eta": [], "limits": {"f0": "big"}}"#, "limits.f0"),
            (r#"{"f": "u", "alpha": 0.1, "beta": [], "eta": [], "solver": {"grid_n": 10}}"#, "\"solver\""),
            (r#"{"f": "u", "alpha": 0.1, "beta": [], "eta": [], "gamma": 1}"#, "gamma"),
            (r#"{"f": "u", "beta": [], "eta": []}"#, "alpha"),
        ];
        for (text, needle) in cases {
            let msg = ProblemConfig::from_json(text).unwrap_err().to_string();
            assert!(msg.contains(needle), "{msg}");
        }
    }

    #[test]
    fn parse_error_reports_offset() {
        let msg = ProblemConfig::from_json(r#"{"f": "u + $", "alpha": 0, "beta": [], "eta": []}"#)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("byte 4"), "{msg}");
    }

    #[test]
    fn structural_violation_cites_condition() {
        let c = ProblemConfig::from_json(r#"{"f": "u", "alpha": 0.9, "beta": [0.2], "eta": [0.5]}"#).unwrap();
        assert!(c.problem_unchecked().is_ok());
        assert!(c.problem().unwrap_err().to_string().contains("(C3)"));
    }

    #[test]
    fn declared_limits_are_read() {
        let c = ProblemConfig::from_json(
            r#"{"f": "u", "alpha": 0, "beta": [], "eta": [], "limits": {"f0": "inf", "fsupinf": "zero"}}"#,
        )
        .unwrap();
        let d = c.declared_limits().unwrap();
        assert_eq!(d[&Functional::F0], Classification::Infinite);
        assert_eq!(d[&Functional::FSupInf], Classification::Zero);
    }
}
