//! The named experiments behind `cvqec run`.

mod mc_sweep;
mod spectra;
mod syndrome_demo;
mod table2;
mod table_c1;
mod witness;

use std::path::PathBuf;

use crate::config::{Experiment, ExperimentConfig};
use crate::sim::thread_pool;
use crate::HarnessError;

pub use syndrome_demo::swept_displacement;
pub use table_c1::{noise_rows, NoiseRow};

/// Files written by a run and a short human-readable digest.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out)?;
    let pool = thread_pool()?;
    match cfg.experiment {
        Experiment::Table2 => table2::run(cfg, &pool),
        Experiment::TableC1 => table_c1::run(cfg),
        Experiment::SyndromeDemo => syndrome_demo::run(cfg),
        Experiment::Spectra => spectra::run(cfg, &pool),
        Experiment::Witness => witness::run(cfg),
        Experiment::McSweep => mc_sweep::run(cfg, &pool),
    }
}
