//! JSON experiment configuration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::channels::{ChannelKind, ChannelSpec, EvolveParams, NoiseConfig};
use crate::factorization::{Tolerances, VerifyOptions};
use crate::state::GhzSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_qubits: usize,
    pub state: StateConfig,
    pub channels: Vec<ChannelConfig>,
    pub grid: GridConfig,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
    /// Emit one closed-form concurrence column per bipartition.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub per_bipartition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
    pub beta_re: f64,
    #[serde(default)]
    pub beta_im: f64,
    pub pattern: String,
}

/// A channel on one qubit. Under a `p` grid a channel without `p` follows the grid value
/// and a channel with `p` stays fixed; under a `t` grid every channel needs `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub qubit: usize,
    pub kind: ChannelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridParameter {
    #[serde(rename = "p")]
    Probability,
    #[serde(rename = "t")]
    Time,
}

impl GridParameter {
    pub fn column(self) -> &'static str {
        match self {
            GridParameter::Probability => "p",
            GridParameter::Time => "t",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub parameter: GridParameter,
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Spectral,
    Factorized,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Direct, Method::Factorized]
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorized: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_max_qubits: Option<usize>,
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub spec: GhzSpec,
    pub noise: NoiseConfig,
    pub parameter: GridParameter,
    pub points: Vec<(f64, EvolveParams)>,
    pub options: VerifyOptions,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<Experiment, ConfigError> {
        let invalid = |field: &str, message: String| ConfigError::Invalid { field: field.to_string(), message };

        let s = &self.state;
        let spec = GhzSpec::new(
            self.n_qubits,
            Complex64::new(s.alpha_re, s.alpha_im),
            Complex64::new(s.beta_re, s.beta_im),
            &s.pattern,
        )
        .map_err(|e| invalid("state", e.to_string()))?;

        let mut assignments = Vec::with_capacity(self.channels.len());
        for (i, ch) in self.channels.iter().enumerate() {
            let field = format!("channels[{i}]");
            let param = match (self.grid.parameter, ch.p, ch.gamma) {
                (_, Some(_), Some(_)) => return Err(invalid(&field, "give at most one of p and gamma".into())),
                (GridParameter::Time, _, None) => {
                    return Err(invalid(&field, "a t grid requires gamma on every channel".into()))
                }
                (GridParameter::Probability, _, Some(_)) => return Err(invalid(&field, "gamma needs a t grid".into())),
                (_, Some(p), None) => ChannelSpec::with_probability(ch.kind, p),
                (_, None, Some(g)) => ChannelSpec::with_rate(ch.kind, g),
                (GridParameter::Probability, None, None) => ChannelSpec::with_probability(ch.kind, 0.0),
            }
            .map_err(|e| invalid(&field, e.to_string()))?;
            assignments.push((ch.qubit, param));
        }
        let noise = NoiseConfig::new(self.n_qubits, assignments).map_err(|e| invalid("channels", e.to_string()))?;

        let pts = &self.grid.points;
        for (i, &v) in pts.iter().enumerate() {
            let ok = match self.grid.parameter {
                GridParameter::Probability => (0.0..=1.0).contains(&v),
                GridParameter::Time => v >= 0.0 && v.is_finite(),
            };
            if !ok {
                return Err(invalid(&format!("grid.points[{i}]"), format!("value {v} out of range")));
            }
            if i > 0 && !(v > pts[i - 1]) {
                return Err(invalid(&format!("grid.points[{i}]"), "points must be strictly ascending".into()));
            }
        }
        let points = pts
            .iter()
            .map(|&v| {
                let params = match self.grid.parameter {
                    GridParameter::Time => EvolveParams::Time(v),
                    GridParameter::Probability => {
                        EvolveParams::Probabilities(self.channels.iter().map(|ch| ch.p.unwrap_or(v)).collect())
                    }
                };
                (v, params)
            })
            .collect();

        let tol = self.tolerances.unwrap_or_default();
        let defaults = Tolerances::default();
        let tolerances = Tolerances {
            spectral: tol.spectral.unwrap_or(defaults.spectral),
            factorized: tol.factorized.unwrap_or(defaults.factorized),
        };
        if !(tolerances.spectral >= 0.0 && tolerances.factorized >= 0.0) {
            return Err(invalid("tolerances", "tolerances must be nonnegative".into()));
        }
        let options = VerifyOptions {
            spectral: self.methods.contains(&Method::Spectral),
            factorized: self.methods.contains(&Method::Factorized),
            spectral_cap: tol.spectral_max_qubits.unwrap_or(crate::lbc::DEFAULT_QUBIT_CAP),
            tolerances,
            per_bipartition: self.per_bipartition,
        };
        Ok(Experiment { spec, noise, parameter: self.grid.parameter, points, options })
    }

    /// Identical channels of `kind` on `qubits` of an `alpha|i> + beta|~i>` state, swept over `points`
    /// with every route enabled.
    pub fn uniform_sweep(
        n_qubits: usize,
        alpha: f64,
        beta: f64,
        pattern: &str,
        kind: ChannelKind,
        qubits: impl IntoIterator<Item = usize>,
        points: Vec<f64>,
    ) -> Self {
        Self {
            n_qubits,
            state: StateConfig { alpha_re: alpha, alpha_im: 0.0, beta_re: beta, beta_im: 0.0, pattern: pattern.into() },
            channels: qubits.into_iter().map(|qubit| ChannelConfig { qubit, kind, p: None, gamma: None }).collect(),
            grid: GridConfig { parameter: GridParameter::Probability, points },
            methods: vec![Method::Direct, Method::Spectral, Method::Factorized],
            tolerances: None,
            per_bipartition: false,
        }
    }
}
