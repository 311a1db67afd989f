//! Run configuration: a flat JSON file with lower_snake_case keys. Unknown
//! keys are rejected so typos in experiment definitions fail loudly.

use std::path::Path;

use serde::Deserialize;

use crate::dynamics::SolverConfig;
use crate::error::{MhdError, Result};
use crate::grid::Grid;
use crate::state::InitialDataSpec;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "d_nx")]
    pub nx: usize,
    #[serde(default = "d_ny")]
    pub ny: usize,
    #[serde(default = "d_ymax")]
    pub ymax: f64,
    #[serde(default = "d_ell")]
    pub ell: f64,
    #[serde(default = "d_delta")]
    pub delta: f64,
    #[serde(default = "d_c0")]
    pub c0: f64,
    #[serde(default = "d_amp")]
    pub amp_u: f64,
    #[serde(default = "d_amp")]
    pub amp_f: f64,
    #[serde(default = "d_mode")]
    pub mode: usize,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "d_cfl")]
    pub cfl: f64,
    #[serde(default = "d_tend")]
    pub tend: f64,
    #[serde(default = "d_f_floor")]
    pub f_floor: f64,
    #[serde(default = "d_output_every")]
    pub output_every: usize,
    /// 0 disables intermediate snapshots
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "d_true")]
    pub dealias: bool,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

fn d_nx() -> usize {
    32
}
fn d_ny() -> usize {
    256
}
fn d_ymax() -> f64 {
    20.0
}
fn d_ell() -> f64 {
    0.6
}
fn d_delta() -> f64 {
    2.0
}
fn d_c0() -> f64 {
    1.0
}
fn d_amp() -> f64 {
    0.1
}
fn d_mode() -> usize {
    1
}
fn d_dt() -> f64 {
    1e-3
}
fn d_cfl() -> f64 {
    0.5
}
fn d_tend() -> f64 {
    0.1
}
fn d_f_floor() -> f64 {
    1e-3
}
fn d_output_every() -> usize {
    10
}
fn d_true() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults are total")
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| MhdError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::build(self.nx, self.ny, self.ymax, self.ell, self.delta)
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            cfl: self.cfl,
            tend: self.tend,
            f_floor: self.f_floor,
            output_every: self.output_every,
            dealias: self.dealias,
        }
    }

    pub fn initial_data(&self) -> InitialDataSpec {
        InitialDataSpec {
            c0: self.c0,
            delta: self.delta,
            amp_u: self.amp_u,
            amp_f: self.amp_f,
            mode: self.mode,
        }
    }
}
