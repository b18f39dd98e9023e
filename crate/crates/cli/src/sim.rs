//! Seeded parallel batches of rounds and shots.
//!
//! Trial `i` of stream `s` always draws from `substream(seed, s << 32 | i)`
//! and results are collected in trial order, so outputs do not depend on the
//! thread count.

use cvqec_core::error_channel::ErrorConfig;
use cvqec_core::qec::{substream, CodeConfig, RoundOptions, RoundRunner, SampleSummary, ShotSampler, TrialRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::HarnessError;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "CVQEC_THREADS";

pub fn thread_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var(THREADS_ENV) {
        let n = text
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| HarnessError::Config(format!("{THREADS_ENV} must be a positive integer, got {text:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| HarnessError::Config(e.to_string()))
}

fn stream_index(stream: u32, trial: usize) -> u64 {
    (u64::from(stream) << 32) | trial as u64
}

/// `f(trial, rng)` for every trial, in trial order.
pub fn par_trials<T, F>(pool: &rayon::ThreadPool, seed: u64, stream: u32, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut TrialRng) -> T + Sync,
{
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| f(i, &mut substream(seed, stream_index(stream, i))))
            .collect()
    })
}

/// Pooled result of many full correction rounds.
#[derive(Debug, Clone, Serialize)]
pub struct RoundBatch {
    pub rounds: usize,
    /// Rounds in which an error occurred.
    pub errors: usize,
    /// Rounds classified as the event that actually happened.
    pub matched: usize,
    /// Corrected output samples of every window.
    pub output: SampleSummary,
    /// Fidelity of the moment-matched output with the input.
    pub fidelity: f64,
    /// Batch-means standard error; needs at least two rounds.
    pub fidelity_se: Option<f64>,
}

impl RoundBatch {
    pub fn accuracy(&self) -> f64 {
        self.matched as f64 / self.rounds as f64
    }
}

const FIDELITY_BATCHES: usize = 10;

struct RoundSamples {
    occurred: bool,
    matched: bool,
    corrected: Vec<[f64; 2]>,
}

pub fn run_rounds(
    pool: &rayon::ThreadPool,
    code: &CodeConfig,
    err: &ErrorConfig,
    window: usize,
    trials: usize,
    seed: u64,
    stream: u32,
) -> Result<RoundBatch, HarnessError> {
    let runner = RoundRunner::new(code, err, RoundOptions { window, keep_traces: true })?;
    let results = par_trials(pool, seed, stream, trials, |_, rng| {
        runner.run(rng).map(|r| RoundSamples {
            occurred: r.event.occurred,
            matched: r.matched,
            corrected: r.traces.unwrap_or_default().iter().map(|t| t.corrected).collect(),
        })
    });
    let rounds = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let input = code.input_state()?;
    let pooled = |rs: &[RoundSamples]| -> Result<SampleSummary, HarnessError> {
        let samples: Vec<[f64; 2]> = rs.iter().flat_map(|r| r.corrected.iter().copied()).collect();
        SampleSummary::from_samples(&samples).ok_or_else(|| HarnessError::Config("too few samples".into()))
    };
    let output = pooled(&rounds)?;
    let fidelity = output.fidelity_with(&input)?;
    let batches = FIDELITY_BATCHES.min(trials);
    let fidelity_se = if batches >= 2 {
        let fs = (0..batches)
            .map(|b| {
                let part = &rounds[b * trials / batches..(b + 1) * trials / batches];
                Ok(pooled(part)?.fidelity_with(&input)?)
            })
            .collect::<Result<Vec<f64>, HarnessError>>()?;
        let m = fs.iter().sum::<f64>() / batches as f64;
        let var = fs.iter().map(|f| (f - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
        Some((var / batches as f64).sqrt())
    } else {
        None
    };
    Ok(RoundBatch {
        rounds: trials,
        errors: rounds.iter().filter(|r| r.occurred).count(),
        matched: rounds.iter().filter(|r| r.matched).count(),
        output,
        fidelity,
        fidelity_se,
    })
}

/// Sample statistics of `shots` single-shot outputs.
pub fn run_shots(
    pool: &rayon::ThreadPool,
    sampler: &ShotSampler,
    shots: usize,
    seed: u64,
    stream: u32,
) -> Result<SampleSummary, HarnessError> {
    let outputs = par_trials(pool, seed, stream, shots, |_, rng| sampler.shot(rng).map(|s| s.output));
    let outputs = outputs.into_iter().collect::<Result<Vec<_>, _>>()?;
    SampleSummary::from_samples(&outputs).ok_or_else(|| HarnessError::Config("need at least two shots".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cvqec_core::qec::{demo_error, Channel};

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let code = CodeConfig::with_r(0.4);
        let err = demo_error(Channel::new(4).unwrap(), 5.0);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = run_rounds(&one, &code, &err, 64, 12, 3, 1).unwrap();
        let b = run_rounds(&four, &code, &err, 64, 12, 3, 1).unwrap();
        assert_eq!(a.output, b.output);
        assert_eq!(a.fidelity_se, b.fidelity_se);
        assert_eq!(a.matched, 12);
    }
}
