//! JSON scenario files: parameters, initial conditions and per-command
//! settings. Every run can echo its scenario back so that it can be replayed.

use serde::{Deserialize, Serialize};

use crate::closed_form::DEFAULT_ORBIT_SAMPLES;
use crate::error::{Error, Result};
use crate::model::{Model, State, VegetationParams};
use crate::presets::{range_warnings, Region};
use crate::simulate::{DetectOptions, GridSpec, Scheme, SweptParam};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSpec {
    pub samples: usize,
}

impl Default for OrbitSpec {
    fn default() -> Self {
        OrbitSpec {
            samples: DEFAULT_ORBIT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweptParam,
    pub values: Vec<f64>,
    /// Probe initial conditions as fractions of `(X_G, Y_T)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<(f64, f64)>>,
}

/// Provenance written alongside outputs; ignored when a scenario is read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub version: String,
    pub command: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: VegetationParams,
    /// Region whose plausible ranges are checked; out-of-range values warn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default)]
    pub initial_conditions: Vec<State>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Number of fire periods to simulate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basin: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detect: Option<DetectOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

pub const DEFAULT_HORIZON: usize = 10;

impl ScenarioConfig {
    pub fn new(params: VegetationParams) -> Self {
        ScenarioConfig {
            params,
            region: None,
            initial_conditions: Vec::new(),
            dt: None,
            horizon: None,
            scheme: Scheme::default(),
            orbit: None,
            basin: None,
            detect: None,
            sweep: None,
            meta: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid("config", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Validates everything and returns warnings for out-of-range values.
    pub fn validate(&self) -> Result<Vec<String>> {
        let m = Model::new(self.params)?;
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::invalid("dt", format!("must be finite and > 0, got {dt}")));
            }
        }
        for s in &self.initial_conditions {
            if !(s.grass >= 0.0 && s.tree >= 0.0 && s.grass.is_finite() && s.tree.is_finite()) {
                return Err(Error::invalid(
                    "initial_conditions",
                    format!("biomasses must be finite and >= 0, got ({}, {})", s.grass, s.tree),
                ));
            }
        }
        if let Some(o) = &self.orbit {
            if o.samples == 0 {
                return Err(Error::invalid("orbit.samples", "must be >= 1"));
            }
        }
        if let Some(d) = &self.detect {
            if d.max_periods == 0 || !(d.conv_rel > 0.0) || !(d.match_rel > 0.0) {
                return Err(Error::invalid("detect", "max_periods and tolerances must be positive"));
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("sweep.values", "must be finite"));
            }
        }
        let mut warnings = match self.region {
            Some(r) => range_warnings(&self.params, r),
            None => Vec::new(),
        };
        for s in &self.initial_conditions {
            if !m.in_invariant_region(s, 0.0) {
                warnings.push(format!(
                    "initial state ({}, {}) lies outside [0, {}] x [0, {}]",
                    s.grass, s.tree, m.derived.x_g, m.derived.y_t
                ));
            }
        }
        Ok(warnings)
    }

    pub fn dt_for(&self, tau: f64) -> f64 {
        self.dt.unwrap_or(tau / 1000.0)
    }
}
