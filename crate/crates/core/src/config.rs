//! Scenario configuration files (TOML) and the bundled scenario presets.
//!
//! The schema is flat key-value sections; unknown keys are rejected so a
//! typo cannot silently change the physics. Parse errors carry the line
//! and column from the TOML reader; semantic errors name the offending
//! key.
//!
//! ```toml
//! [scenario]
//! Z = 30.0            # column length, cm
//! T = 60.0            # final time, s
//! N = 100             # spectral degree
//! dt = 0.06           # time step, s
//! delta = 0.15        # kernel horizon, in (0,1)
//! sink = -0.0007      # constant sink rate, 1/s
//! soil = "example1_sand"              # preset name, or an inline table
//! bc_top = { start = 0.2234, end = 0.1810 }
//! bc_bottom = { start = 0.1386, end = 0.1174 }
//!
//! [scenario.ic.piecewise_linear]
//! bottom_value = 0.1386
//! bottom_slope = 0.0594
//! top_value = 0.2234
//! top_slope = 0.0254
//!
//! [output]
//! times = [0.0, 15.0, 30.0, 45.0, 60.0]
//! csv = "profiles.csv"
//! svg = "profiles.svg"
//!
//! [study]
//! axis = "time"
//! levels = [0.24, 0.12, 0.06, 0.03]
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::soil::{self, VanGenuchtenParams};
use crate::stepper::{BoundaryRamp, InitialCondition, Scenario};

/// Configuration errors: syntactic (with line/column) or semantic (naming
/// the key).
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config error: {0}")]
    Invalid(String),
}

/// Top-level config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: ScenarioSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub study: Option<StudySection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub dt: f64,
    pub delta: f64,
    pub sink: f64,
    pub soil: SoilSpec,
    pub ic: IcSpec,
    pub bc_top: RampSpec,
    pub bc_bottom: RampSpec,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub jacobian_scaling: bool,
}

/// Soil as a preset name or inline Van Genuchten parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SoilSpec {
    Preset(String),
    Params {
        theta_r: f64,
        theta_s: f64,
        alpha: f64,
        n: f64,
        k_s: f64,
    },
}

/// Initial-condition forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum IcSpec {
    PiecewiseLinear {
        bottom_value: f64,
        bottom_slope: f64,
        top_value: f64,
        top_slope: f64,
    },
    Cosine {
        amplitude: f64,
        offset: f64,
    },
    Chebyshev {
        coeffs: Vec<f64>,
    },
    Nodes {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampSpec {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisSpec {
    Time,
    Space,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub axis: AxisSpec,
    pub levels: Vec<f64>,
}

/// Parse and validate a config file.
pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let config: ConfigFile = toml::from_str(text)?;
    config.scenario()?;
    if let Some(study) = &config.study {
        if study.levels.is_empty() {
            return Err(ConfigError::Invalid(
                "study.levels must not be empty".into(),
            ));
        }
    }
    Ok(config)
}

/// Resolve a soil spec to parameters.
pub fn resolve_soil(spec: &SoilSpec) -> Result<VanGenuchtenParams<f64>, ConfigError> {
    match spec {
        SoilSpec::Preset(name) => match name.as_str() {
            "example1_sand" => Ok(soil::example1_sand()),
            "example2_berino" => Ok(soil::example2_berino()),
            other => Err(ConfigError::Invalid(format!(
                "unknown soil preset \"{other}\" (known: example1_sand, example2_berino)"
            ))),
        },
        SoilSpec::Params {
            theta_r,
            theta_s,
            alpha,
            n,
            k_s,
        } => VanGenuchtenParams::new(*theta_r, *theta_s, *alpha, *n, *k_s)
            .map_err(|e| ConfigError::Invalid(format!("soil: {e}"))),
    }
}

impl ConfigFile {
    /// Build and validate the scenario described by this config.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let s = &self.scenario;
        if !s.delta.is_finite() || s.delta <= 0.0 || s.delta >= 1.0 {
            return Err(ConfigError::Invalid(format!(
                "delta must lie in (0, 1), got {}",
                s.delta
            )));
        }
        if s.n < 2 {
            return Err(ConfigError::Invalid(format!(
                "N must be at least 2, got {}",
                s.n
            )));
        }
        if !s.dt.is_finite() || s.dt <= 0.0 {
            return Err(ConfigError::Invalid(format!(
                "dt must be > 0, got {}",
                s.dt
            )));
        }
        if !s.t.is_finite() || s.t < 0.0 {
            return Err(ConfigError::Invalid(format!("T must be >= 0, got {}", s.t)));
        }
        if !s.z.is_finite() || s.z <= 0.0 {
            return Err(ConfigError::Invalid(format!("Z must be > 0, got {}", s.z)));
        }
        let soil = resolve_soil(&s.soil)?;
        let ic = match &s.ic {
            IcSpec::PiecewiseLinear {
                bottom_value,
                bottom_slope,
                top_value,
                top_slope,
            } => InitialCondition::PiecewiseLinear {
                bottom_value: *bottom_value,
                bottom_slope: *bottom_slope,
                top_value: *top_value,
                top_slope: *top_slope,
            },
            IcSpec::Cosine { amplitude, offset } => InitialCondition::Cosine {
                amplitude: *amplitude,
                offset: *offset,
            },
            IcSpec::Chebyshev { coeffs } => InitialCondition::Chebyshev {
                coeffs: coeffs.clone(),
            },
            IcSpec::Nodes { values } => InitialCondition::Nodes {
                values: values.clone(),
            },
        };
        let scenario = Scenario {
            z_len: s.z,
            t_final: s.t,
            degree: s.n,
            dt: s.dt,
            delta: s.delta,
            soil,
            sink: s.sink,
            ic,
            bc_top: BoundaryRamp {
                start: s.bc_top.start,
                end: s.bc_top.end,
            },
            bc_bottom: BoundaryRamp {
                start: s.bc_bottom.start,
                end: s.bc_bottom.end,
            },
            jacobian_scaling: s.jacobian_scaling,
        };
        scenario
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(scenario)
    }
}

/// The two bundled scenarios.
pub mod presets {
    use super::*;

    /// Names accepted by `--preset`.
    pub const NAMES: [&str; 2] = ["example1", "example2"];

    /// Sand column, kinked initial profile. N = 100, Δt = 0.06 s,
    /// δ = 0.15, T = 60 s, Z = 30 cm; sink −7.0e−4 s⁻¹.
    pub fn example1() -> Scenario {
        Scenario {
            z_len: 30.0,
            t_final: 60.0,
            degree: 100,
            dt: 0.06,
            delta: 0.15,
            soil: soil::example1_sand(),
            sink: -700.0e-6,
            ic: InitialCondition::PiecewiseLinear {
                bottom_value: 0.1386,
                bottom_slope: 0.0594,
                top_value: 0.2234,
                top_slope: 0.0254,
            },
            bc_top: BoundaryRamp {
                start: 0.2234,
                end: 0.1810,
            },
            bc_bottom: BoundaryRamp {
                start: 0.1386,
                end: 0.1174,
            },
            jacobian_scaling: false,
        }
    }

    /// Berino loamy fine sand, smooth cosine initial profile. N = 100,
    /// Δt = 0.06 s, δ = 0.15, T = 60 s, Z = 30 cm; sink −1.0e−3 s⁻¹.
    pub fn example2() -> Scenario {
        Scenario {
            z_len: 30.0,
            t_final: 60.0,
            degree: 100,
            dt: 0.06,
            delta: 0.15,
            soil: soil::example2_berino(),
            sink: -1000.0e-6,
            ic: InitialCondition::Cosine {
                amplitude: -0.0674,
                offset: 0.1972,
            },
            bc_top: BoundaryRamp {
                start: 0.2646,
                end: 0.1972,
            },
            bc_bottom: BoundaryRamp {
                start: 0.1298,
                end: 0.0960,
            },
            jacobian_scaling: false,
        }
    }

    pub fn by_name(name: &str) -> Option<Scenario> {
        match name {
            "example1" => Some(example1()),
            "example2" => Some(example2()),
            _ => None,
        }
    }
}
