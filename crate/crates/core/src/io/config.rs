//! TOML configuration for the `t2ta` commands.
//!
//! Every section and field is optional; missing values take the defaults
//! below. Unknown fields are rejected.
//!
//! ```toml
//! [scenario]          # ScenarioSpec
//! positions = [[0.0, 0.0], [1.0, 10.0]]
//! n = 6
//! m = 1
//! cov_seed = 2023
//! position_std = 0.2
//! velocity_std = 1.0
//! acceleration_std = 1.0
//!
//! [sweep]
//! runs = 1000
//! seed = 1
//! c_min = 0.1         # used when c_grid is absent
//! c_max = 5.0
//! c_step = 0.1
//! # c_grid = [0.5, 1.0]
//! k_max = 25
//! methods = ["full", "fusion-opt", "assoc-opt"]
//!
//! [sweep.bounds]
//! alpha_low = 0.001
//! alpha_high = 0.5
//!
//! [motivating]
//! step_deg = 1.0
//!
//! [realization]
//! seeds = [1, 0]
//!
//! [trace]             # TraceSpec
//! seed = 1
//!
//! [lap]
//! costs = [[0.11, 0.01], [0.01, 0.11]]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::maximin::{StepBounds, DEFAULT_ALPHA_HIGH, DEFAULT_ALPHA_LOW, DEFAULT_K_MAX};
use crate::simulation::experiments::{TraceSpec, DEMO_SEEDS};
use crate::simulation::montecarlo::{McConfig, Method};
use crate::simulation::scenario::ScenarioSpec;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: &str, message: impl fmt::Display) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub alpha_low: f64,
    pub alpha_high: f64,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self {
            alpha_low: DEFAULT_ALPHA_LOW,
            alpha_high: DEFAULT_ALPHA_HIGH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub runs: usize,
    pub seed: u64,
    pub c_grid: Option<Vec<f64>>,
    pub c_min: f64,
    pub c_max: f64,
    pub c_step: f64,
    pub k_max: usize,
    pub methods: Vec<Method>,
    pub bounds: BoundsSection,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            runs: 1000,
            seed: 1,
            c_grid: None,
            c_min: 0.1,
            c_max: 5.0,
            c_step: 0.1,
            k_max: DEFAULT_K_MAX,
            methods: Method::ALL.to_vec(),
            bounds: BoundsSection::default(),
        }
    }
}

/// `c_min, c_min + c_step, ...` up to `c_max` (inclusive within rounding).
/// Values are rounded to 9 decimals so that decimal steps stay exact.
pub fn linear_grid(c_min: f64, c_max: f64, c_step: f64) -> Vec<f64> {
    let count = ((c_max - c_min) / c_step + 1e-9).floor() as usize;
    (0..=count)
        .map(|k| ((c_min + k as f64 * c_step) * 1e9).round() / 1e9)
        .collect()
}

impl SweepSection {
    pub fn c_values(&self) -> Vec<f64> {
        match &self.c_grid {
            Some(grid) => grid.clone(),
            None => linear_grid(self.c_min, self.c_max, self.c_step),
        }
    }

    pub fn to_mc_config(&self) -> Result<McConfig, ConfigError> {
        if self.runs == 0 {
            return Err(ConfigError::invalid("sweep.runs", "must be at least 1"));
        }
        if self.c_grid.is_none() {
            if !(self.c_min > 0.0 && self.c_min.is_finite()) {
                return Err(ConfigError::invalid("sweep.c_min", "must be positive"));
            }
            if !(self.c_step > 0.0 && self.c_step.is_finite()) {
                return Err(ConfigError::invalid("sweep.c_step", "must be positive"));
            }
            if !(self.c_max >= self.c_min && self.c_max.is_finite()) {
                return Err(ConfigError::invalid(
                    "sweep.c_max",
                    "must be at least c_min",
                ));
            }
        }
        let c_grid = self.c_values();
        if c_grid.is_empty() {
            return Err(ConfigError::invalid("sweep.c_grid", "must not be empty"));
        }
        if c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(ConfigError::invalid(
                "sweep.c_grid",
                "values must be positive",
            ));
        }
        if c_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::invalid(
                "sweep.c_grid",
                "must be strictly ascending",
            ));
        }
        if self.methods.is_empty() {
            return Err(ConfigError::invalid(
                "sweep.methods",
                "at least one method is required",
            ));
        }
        let bounds = StepBounds::new(self.bounds.alpha_low, self.bounds.alpha_high)
            .map_err(|e| ConfigError::invalid("sweep.bounds", e))?;
        Ok(McConfig {
            runs: self.runs,
            c_grid,
            seed: self.seed,
            bounds,
            k_max: self.k_max,
            methods: self.methods.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotivatingSection {
    pub step_deg: f64,
}

impl Default for MotivatingSection {
    fn default() -> Self {
        Self { step_deg: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RealizationSection {
    pub seeds: [u64; 2],
}

impl Default for RealizationSection {
    fn default() -> Self {
        Self {
            seeds: [DEMO_SEEDS.0, DEMO_SEEDS.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LapSection {
    pub costs: Option<Vec<Vec<f64>>>,
}

/// Whole configuration file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub scenario: ScenarioSpec,
    pub sweep: SweepSection,
    pub motivating: MotivatingSection,
    pub realization: RealizationSection,
    pub trace: TraceSpec,
    pub lap: LapSection,
}

impl Config {
    /// Checks every section; errors name the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario
            .validate()
            .map_err(|(field, msg)| ConfigError::invalid(&format!("scenario.{field}"), msg))?;
        self.sweep.to_mc_config()?;
        if !(self.motivating.step_deg > 0.0 && self.motivating.step_deg <= 180.0) {
            return Err(ConfigError::invalid(
                "motivating.step_deg",
                "must be in (0, 180]",
            ));
        }
        let t = &self.trace;
        if t.num_targets < 2 {
            return Err(ConfigError::invalid(
                "trace.num_targets",
                "must be at least 2",
            ));
        }
        if t.n < 2 {
            return Err(ConfigError::invalid("trace.n", "must be at least 2"));
        }
        if !(t.spread > 0.0 && t.spread.is_finite()) {
            return Err(ConfigError::invalid("trace.spread", "must be positive"));
        }
        StepBounds::new(t.alpha_low, t.alpha_high)
            .map_err(|e| ConfigError::invalid("trace.alpha_low", e))?;
        if let Some(costs) = &self.lap.costs {
            let n = costs.len();
            if n == 0 || costs.iter().any(|r| r.len() != n) {
                return Err(ConfigError::invalid(
                    "lap.costs",
                    "must be a non-empty square matrix",
                ));
            }
            if costs
                .iter()
                .flatten()
                .any(|c| !(c.is_finite() && *c >= 0.0))
            {
                return Err(ConfigError::invalid(
                    "lap.costs",
                    "entries must be finite and nonnegative",
                ));
            }
        }
        Ok(())
    }
}

/// Parses and validates configuration text.
pub fn parse_config_str(text: &str) -> Result<Config, ConfigError> {
    let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads, parses and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}
