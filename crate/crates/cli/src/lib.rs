//! Experiment driver for the five-wave-packet error-correction simulator.
//!
//! Each experiment reads an [`ExperimentConfig`], runs seeded and
//! thread-count independent simulations, and writes CSV and JSON reports.
//! [`verify`] holds the acceptance checks behind `cvqec verify`.

pub mod config;
pub mod experiments;
pub mod reference;
pub mod sim;
pub mod verify;

use std::path::Path;

use cvqec_core::error_channel::ErrorChannelError;
use cvqec_core::gaussian::GaussianError;
use cvqec_core::network::NetworkError;
use cvqec_core::qec::QecError;
use cvqec_core::witness::WitnessError;
use serde::Serialize;
use thiserror::Error;

pub use config::{Experiment, ExperimentConfig, SweepParameter, SweepSpec};
pub use experiments::{run_experiment, RunSummary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Qec(#[from] QecError),
    #[error(transparent)]
    ErrorChannel(#[from] ErrorChannelError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
