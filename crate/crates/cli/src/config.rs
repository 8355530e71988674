//! The TOML run configuration.
//!
//! ```toml
//! [model]                 # required; the ModelParams fields
//! n_levels = 101
//! bandwidth = 1.0
//! gamma = 1.0
//! grid_offset = 0.0       # default 0
//! seed = 0                # default 0; --seed overrides
//! [model.coupling]
//! kind = "constant"       # or "random" with std and distribution = "uniform" | "gaussian"
//! u = 0.1
//!
//! [rc]                    # optional; needed by method = "full"
//! m_levels = 4001
//! bandwidth = 40.0
//!
//! [time]
//! t_max = 100.0           # default 100
//! n_points = 2000         # default 2000
//! spacing = "linear"      # or "log"
//! t_min = 1e-3            # first nonzero point of a log grid; default t_max·1e-4
//!
//! [solver]
//! method = "spectral"     # spectral | ode | full | all; --method overrides
//! rtol = 1e-9
//! atol = 1e-12
//! max_dim = 5001
//!
//! [ensemble]
//! n_realizations = 100
//! window = [5.0, 80.0]    # default [5/D, 0.8/d]
//!
//! [output]
//! directory = "out"       # --out overrides
//! formats = ["csv", "json"]
//!
//! [fit]
//! model = "exponential"   # exponential | damped_cosine | sinc
//! window = [1.0, 100.0]   # default: the whole trajectory
//! ```

use std::path::{Path, PathBuf};

use hierdecay::analysis::FitModel;
use hierdecay::dynamics::{OdeOptions, Spacing, DEFAULT_GRID_POINTS};
use hierdecay::model::ModelParams;
use hierdecay::spectral::DEFAULT_MAX_DIM;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(default)]
    pub rc: Option<RcConfig>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub fit: Option<FitConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcConfig {
    pub m_levels: usize,
    pub bandwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
    pub t_min: Option<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_max: 100.0,
            n_points: DEFAULT_GRID_POINTS,
            spacing: Spacing::Linear,
            t_min: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Spectral,
    Ode,
    Full,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub method: MethodChoice,
    pub rtol: f64,
    pub atol: f64,
    pub max_dim: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let ode = OdeOptions::default();
        SolverConfig {
            method: MethodChoice::Spectral,
            rtol: ode.rtol,
            atol: ode.atol,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_realizations: usize,
    #[serde(default)]
    pub window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub model: FitModel,
    #[serde(default)]
    pub window: Option<(f64, f64)>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Checks that are not expressible in the schema itself.
    pub fn check(&self) -> Result<(), CliError> {
        self.model.validate()?;
        let t = &self.time;
        if !(t.t_max > 0.0 && t.t_max.is_finite()) {
            return Err(CliError::Config(format!(
                "time.t_max must be > 0, got {}",
                t.t_max
            )));
        }
        if t.n_points < 2 {
            return Err(CliError::Config("time.n_points must be at least 2".into()));
        }
        if let Some(t_min) = t.t_min {
            if !(t_min > 0.0 && t_min < t.t_max) {
                return Err(CliError::Config(format!(
                    "time.t_min must lie in (0, t_max), got {t_min}"
                )));
            }
        }
        self.ode_options().validate()?;
        if self.output.formats.is_empty() {
            return Err(CliError::Config("output.formats must not be empty".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let t = &self.time;
        match t.spacing {
            Spacing::Linear => hierdecay::dynamics::linear_grid(t.t_max, t.n_points),
            Spacing::Log => hierdecay::dynamics::log_grid(
                t.t_min.unwrap_or(t.t_max * 1e-4),
                t.t_max,
                t.n_points,
            ),
        }
    }

    pub fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.solver.rtol,
            atol: self.solver.atol,
            ..OdeOptions::default()
        }
    }

    /// The effective configuration, embedded in every output's metadata.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is always serializable")
    }
}
