//! Experiments reproducing the connector-operator simulations: Sx
//! reconstruction, fidelity landscapes, GHZ generation, quantum kicks and
//! generic parameter sweeps. Every run writes CSV files whose first line
//! records the resolved configuration.

pub mod commands;
pub mod config;
pub mod error;
pub mod render;

use std::path::Path;

pub use commands::{run, RunOutput};
pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;

/// Defaults for `experiment`, then the config file, then `overrides` in order.
pub fn resolve_config(
    experiment: Experiment,
    file: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    if let Some(path) = file {
        cfg.apply_file(path)?;
    }
    for (k, v) in overrides {
        cfg.set(k, v).map_err(CliError::Config)?;
    }
    cfg.validate()?;
    Ok(cfg)
}
