//! Figure presets.
//!
//! | name          | content                                                        |
//! |---------------|----------------------------------------------------------------|
//! | `fig3a`       | populations, ω₀ = 1e8, γ = 0, c = 2e7                          |
//! | `fig3b`       | populations, ω₀ = 1e8, γ = 5e6, c = 2γ                         |
//! | `fig-offdiag` | real and imaginary coherences, same rates as `fig3b`           |
//! | `fig-dectime` | τ_D over γ ∈ [1e6, 1e8] s⁻¹ at ω = 1e9 … 1e12 s⁻¹               |
//! | `fig-cd`      | C_d for c ∈ {0, 1e7, 2e7, 4e7}, ω₀ = 1e8, γ = 5e6              |
//! | `fig-g2`      | g²(τ) for the same hopping rates                               |
//!
//! Time-series presets start from the equal superposition, run 2 µs of
//! lab-frame Lindblad dynamics with the Hermitian hopping term, and carry a
//! `mode_tag` comment in their CSV.

use std::path::{Path, PathBuf};

use crate::Error;

use super::config::{parse_config, ExperimentConfig, Output, PRESETS};
use super::run::{dectime_preset_artifact, g2_artifact, run_g2, run_series, series_artifact, Artifact};

pub fn preset_config(name: &str) -> Result<ExperimentConfig, Error> {
    Ok(parse_config(&format!("preset = {name}"))?)
}

/// Computes a preset without writing anything.
pub fn preset_artifact(name: &str) -> Result<Artifact, Error> {
    let cfg = preset_config(name)?;
    Ok(match cfg.outputs[0] {
        Output::Dectime => dectime_preset_artifact()?,
        Output::G2 => g2_artifact(&cfg, &run_g2(&cfg)?),
        kind => series_artifact(&cfg, &run_series(&cfg)?, kind),
    })
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.svg`.
pub fn run_preset(name: &str, dir: &Path) -> Result<Vec<PathBuf>, Error> {
    preset_artifact(name)?.write(dir, name)
}

pub fn preset_names() -> &'static [&'static str] {
    &PRESETS
}
