//! JSON problem description shared by the command line tools.
//!
//! ```json
//! {
//!   "p": 2.0,
//!   "omega": { "kind": "disk", "radius": 1.0 },
//!   "g": { "kind": "constant", "value": 3.0 },
//!   "solver": { "angular_nodes": 256, "radial_layers": 65 },
//!   "output_dir": "out"
//! }
//! ```
//!
//! Unknown keys are rejected everywhere. The `solver` block may be partial;
//! missing entries take their defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freeboundary::{SolverConfig, SolverError};
use crate::geometry::{BoundaryConstraint, ConvexBody, FourierTerm, GeometryError};
use crate::hull::Point;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OmegaSpec {
    Disk {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        rotation: f64,
    },
    /// `h(θ) = a0 + Σ a_k cos kθ + b_k sin kθ`, convexified on the grid.
    SupportFourier {
        a0: f64,
        #[serde(default)]
        terms: Vec<FourierTerm>,
    },
    /// Support values on the solver's angular grid.
    SupportSamples { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GSpec {
    Constant {
        value: f64,
    },
    Fourier {
        a0: f64,
        #[serde(default)]
        terms: Vec<FourierTerm>,
    },
    Samples {
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub p: f64,
    pub omega: OmegaSpec,
    pub g: GSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Range checks, including that `Ω` and `g` can be built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(ConfigError::Invalid(format!("p = {} must be a finite number above 1", self.p)));
        }
        self.solver.validate()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{name} = {v} must be positive")))
            }
        };
        match &self.omega {
            OmegaSpec::Disk { radius, .. } => positive("omega.radius", *radius)?,
            OmegaSpec::Ellipse { a, b, .. } => {
                positive("omega.a", *a)?;
                positive("omega.b", *b)?;
            }
            OmegaSpec::SupportFourier { .. } => {}
            OmegaSpec::SupportSamples { values } => {
                if values.len() != self.solver.angular_nodes {
                    return Err(ConfigError::Invalid(format!(
                        "omega.values has {} entries, solver.angular_nodes is {}",
                        values.len(),
                        self.solver.angular_nodes
                    )));
                }
            }
        }
        self.omega_body()?;
        self.constraint()?;
        Ok(())
    }

    /// `Ω` on the solver's angular grid.
    pub fn omega_body(&self) -> Result<ConvexBody, ConfigError> {
        let m = self.solver.angular_nodes;
        let body = match &self.omega {
            OmegaSpec::Disk { radius, center } => ConvexBody::disk(Point::new(center[0], center[1]), *radius, m)?,
            OmegaSpec::Ellipse { a, b, center, rotation } => ConvexBody::ellipse(*a, *b, Point::new(center[0], center[1]), *rotation, m)?,
            OmegaSpec::SupportFourier { a0, terms } => ConvexBody::from_fn(m, |t| {
                a0 + terms.iter().map(|f| f.a * (f.k as f64 * t).cos() + f.b * (f.k as f64 * t).sin()).sum::<f64>()
            })?,
            OmegaSpec::SupportSamples { values } => ConvexBody::from_support(values)?,
        };
        Ok(body)
    }

    pub fn constraint(&self) -> Result<BoundaryConstraint, ConfigError> {
        let g = match &self.g {
            GSpec::Constant { value } => BoundaryConstraint::constant(*value)?,
            GSpec::Fourier { a0, terms } => BoundaryConstraint::fourier(*a0, terms.clone(), self.solver.angular_nodes)?,
            GSpec::Samples { values } => BoundaryConstraint::samples(values.clone())?,
        };
        Ok(g)
    }

    /// The constant value of `g`, if it is one.
    pub fn constant_g(&self) -> Option<f64> {
        match self.g {
            GSpec::Constant { value } => Some(value),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DISK: &str = r#"{"p": 2, "omega": {"kind": "disk", "radius": 1}, "g": {"kind": "constant", "value": 3}}"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ProblemConfig::from_json(DISK).unwrap();
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.omega_body().unwrap().grid_size(), 256);
        assert_eq!(c.constant_g(), Some(3.0));
    }

    #[test]
    fn unknown_and_missing_keys() {
        let err =
            ProblemConfig::from_json(r#"{"omega": {"kind": "disk", "radius": 1}, "g": {"kind": "constant", "value": 3}}"#).unwrap_err();
        assert!(err.to_string().contains("`p`"), "{err}");
        let extra = DISK.replace("\"p\": 2", "\"p\": 2, \"q\": 1");
        assert!(ProblemConfig::from_json(&extra).is_err());
        let nested = DISK.replace("\"radius\": 1", "\"radius\": 1, \"r\": 2");
        assert!(ProblemConfig::from_json(&nested).is_err());
        let solver = DISK.replace("\"p\": 2", "\"p\": 2, \"solver\": {\"omega\": 0.5}");
        assert!(ProblemConfig::from_json(&solver).is_err());
    }

    #[test]
    fn range_checks() {
        assert!(ProblemConfig::from_json(&DISK.replace("\"p\": 2", "\"p\": 1")).is_err());
        assert!(ProblemConfig::from_json(&DISK.replace("\"value\": 3", "\"value\": -3")).is_err());
        assert!(ProblemConfig::from_json(&DISK.replace("\"radius\": 1", "\"radius\": 0")).is_err());
        let short = r#"{"p": 2, "omega": {"kind": "support_samples", "values": [1, 1, 1]}, "g": {"kind": "constant", "value": 3}}"#;
        assert!(ProblemConfig::from_json(short).is_err());
    }

    fn omega_strategy() -> impl Strategy<Value = OmegaSpec> {
        prop_oneof![
            (0.5..4.0f64, -0.2..0.2f64, -0.2..0.2f64).prop_map(|(radius, x, y)| OmegaSpec::Disk { radius, center: [x, y] }),
            (0.5..3.0f64, 0.5..3.0f64, -1.0..1.0f64).prop_map(|(a, b, rotation)| OmegaSpec::Ellipse { a, b, center: [0.0, 0.0], rotation }),
            (1.0..2.0f64, -0.1..0.1f64).prop_map(|(a0, a)| OmegaSpec::SupportFourier { a0, terms: vec![FourierTerm { k: 2, a, b: 0.0 }] }),
            (1.0..2.0f64).prop_map(|r| OmegaSpec::SupportSamples { values: vec![r; 64] }),
        ]
    }

    fn g_strategy() -> impl Strategy<Value = GSpec> {
        prop_oneof![
            (1.0..10.0f64).prop_map(|value| GSpec::Constant { value }),
            (3.0..6.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(a0, a, b)| GSpec::Fourier { a0, terms: vec![FourierTerm { k: 1, a, b }] }),
            (8..20usize).prop_flat_map(|n| prop::collection::vec(1.0..5.0f64, 2 * n)).prop_map(|values| GSpec::Samples { values }),
        ]
    }

    proptest! {
        #[test]
        fn config_round_trips(
            p in 1.1..6.0f64,
            omega in omega_strategy(),
            g in g_strategy(),
            damping in 0.05..1.0f64,
            tol in 1e-6..1e-1f64,
            seed in any::<u64>(),
            dir in proptest::option::of("[a-z]{1,8}"),
        ) {
            let solver = SolverConfig { angular_nodes: 64, radial_layers: 33, damping, tol_residual: tol, ..SolverConfig::default() };
            let config = ProblemConfig { p, omega, g, solver, output_dir: dir, seed };
            let back = ProblemConfig::from_json(&config.to_json()).unwrap();
            prop_assert_eq!(back, config);
        }
    }
}
