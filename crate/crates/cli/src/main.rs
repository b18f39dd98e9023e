use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use cvqec_cli::verify;
use cvqec_cli::{run_experiment, Experiment, ExperimentConfig};

/// Five-wave-packet quantum error-correction simulator.
#[derive(Parser)]
#[command(name = "cvqec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV and JSON reports.
    Run {
        experiment: Experiment,
        /// JSON experiment config; its `experiment` must match.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        /// Samples per syndrome window.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Run every acceptance check and print one line per criterion.
    Verify,
}

fn main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Run { experiment, config, seed, out, trials, window } => {
            let mut cfg = match &config {
                Some(path) => {
                    let cfg = ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?;
                    if cfg.experiment != experiment {
                        bail!("{} configures {}, not {experiment}", path.display(), cfg.experiment);
                    }
                    cfg
                }
                None => ExperimentConfig::new(experiment),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(out) = out {
                cfg.out = out;
            }
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            if let Some(window) = window {
                cfg.window = window;
            }
            let summary = run_experiment(&cfg)?;
            for line in &summary.lines {
                println!("{line}");
            }
            for file in &summary.files {
                eprintln!("wrote {}", file.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let exe = std::env::current_exe().ok();
            let outcomes = verify::run_all(exe.as_deref());
            for o in &outcomes {
                println!("{o}");
            }
            Ok(if outcomes.iter().all(|o| o.passed) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
