//! TOML run configuration with strict key checking.
//!
//! ```toml
//! output_dir = "out"
//! model = "hall_mhd"            # optional: hall_mhd | navier_stokes | linear
//!
//! [grid]
//! n = 64
//! M = 16.0
//!
//! [physics]
//! mu = 1.0
//! nu = 1.0
//! kappa = 1.0
//!
//! [integrator]
//! dt = 0.2
//! scheme = "IF-RK3"
//! t_end = 25.6
//! cfl_hall = 0.25               # optional
//!
//! [data]
//! amplitude = 0.05
//! spectrum_slope = 0.0
//! band = [0.0, 1.0]
//! seed = 1
//! divergence_free = true        # optional
//!
//! [regularity]                  # optional
//! sigma = 0.5
//! gamma = 1.5
//! s = 0.0
//!
//! [diagnostics]
//! sample_dt = 0.4
//! norms = [{ kind = "l2" }, { kind = "hdot", s = 1.0 }]
//! besov = [{ s = -1.5, p = 2, r = "inf" }]
//! checkpoints_every = 0         # steps between checkpoints; 0 disables
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::integrator::{cfl_bound, steps_between};
use crate::dynamics::rhs::sup_magnitude;
use crate::dynamics::{IntegratorConfig, Model, PhysicalParams};
use crate::experiments::{gen_initial_data, DataSpec, RegularityParams};
use crate::lp::BesovSpec;
use crate::spectral::{Grid, NormKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "M")]
    pub box_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub sample_dt: f64,
    #[serde(default = "default_norms")]
    pub norms: Vec<NormKind>,
    #[serde(default)]
    pub besov: Vec<BesovSpec>,
    #[serde(default)]
    pub checkpoints_every: usize,
}

fn default_norms() -> Vec<NormKind> {
    vec![NormKind::L2]
}

fn default_model() -> Model {
    Model::HallMhd
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    #[serde(default = "default_model")]
    pub model: Model,
    pub grid: GridConfig,
    pub physics: PhysicalParams,
    pub integrator: IntegratorConfig,
    pub data: DataSpec,
    #[serde(default)]
    pub regularity: RegularityParams,
    pub diagnostics: DiagnosticsConfig,
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Config {
        path: path.to_string(),
        message: match e {
            Error::InvalidParameter(m) | Error::InvalidGrid(m) => m,
            other => other.to_string(),
        },
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.box_scale)
    }

    /// Steps between diagnostics samples.
    pub fn sample_every(&self) -> Result<usize> {
        steps_between(0.0, self.diagnostics.sample_dt, self.integrator.dt)
    }

    /// Checks every nested invariant, including the Hall CFL bound for the initial data.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid().map_err(at("grid"))?;
        self.physics.validate().map_err(at("physics"))?;
        self.integrator.validate().map_err(at("integrator"))?;
        steps_between(0.0, self.integrator.t_end, self.integrator.dt).map_err(at("integrator.t_end"))?;
        self.data.validate(&grid).map_err(at("data"))?;
        let reg = &self.regularity;
        if !(reg.sigma > 0.0 && reg.sigma < 2.0) {
            return Err(Error::Config {
                path: "regularity.sigma".into(),
                message: format!("sigma must lie in (0,2), got {}", reg.sigma),
            });
        }
        reg.validate().map_err(at("regularity"))?;
        let d = &self.diagnostics;
        if !(d.sample_dt >= self.integrator.dt) {
            return Err(Error::Config {
                path: "diagnostics.sample_dt".into(),
                message: format!(
                    "sample_dt = {} must be at least dt = {}",
                    d.sample_dt, self.integrator.dt
                ),
            });
        }
        self.sample_every().map_err(at("diagnostics.sample_dt"))?;
        for b in &d.besov {
            b.validate().map_err(at("diagnostics.besov"))?;
        }
        if !d.besov.is_empty() {
            crate::lp::build_partition(&grid).map_err(at("diagnostics.besov"))?;
        }
        if self.model == Model::HallMhd {
            let (_, b0) = gen_initial_data(&self.data, &grid).map_err(at("data"))?;
            let bound = cfl_bound(&grid, sup_magnitude(&b0), self.integrator.cfl_hall);
            if self.integrator.dt > bound {
                return Err(Error::Config {
                    path: "integrator.dt".into(),
                    message: format!(
                        "dt = {} exceeds the Hall CFL bound {bound} for the initial data",
                        self.integrator.dt
                    ),
                });
            }
        }
        Ok(())
    }

    /// Canonical TOML with every default filled in.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            path: String::new(),
            message: e.to_string(),
        })
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config {
        path: String::new(),
        message: e.to_string().trim_end().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Config { path: field, message } => Error::Config {
            path: if field.is_empty() {
                path.display().to_string()
            } else {
                format!("{}: {field}", path.display())
            },
            message,
        },
        other => other,
    })
}
