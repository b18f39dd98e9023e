//! Output noise per error channel with and without the feedforward.

use cvqec_core::error_channel::{ChannelPolicy, ErrorConfig};
use cvqec_core::gaussian::variance_to_db;
use cvqec_core::qec::{correction_plan, Channel, Classification, CodePipeline, ShotSampler};
use serde::Serialize;

use super::RunSummary;
use crate::config::{ConfigEcho, ExperimentConfig};
use crate::sim::run_shots;
use crate::{write_csv, write_json, HarnessError};

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    /// `none` for the error-free reference.
    pub channel: String,
    pub quadrature: &'static str,
    pub uncorrected_theory_db: f64,
    pub corrected_theory_db: f64,
    pub uncorrected_mc_db: f64,
    pub corrected_mc_db: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'static str,
    config: ConfigEcho<'a>,
    shots_per_row: usize,
    rows: &'a [SpectrumRow],
}

pub(super) fn run(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<RunSummary, HarnessError> {
    let code = &cfg.code;
    let pipe = CodePipeline::new(code, code.basis())?;
    let moments = cfg.error.law.moments(cfg.error.amplitude);
    let shots = cfg.trials * cfg.window;
    let mut rows = Vec::new();
    let targets: Vec<Option<Channel>> = std::iter::once(None).chain(Channel::ALL.map(Some)).collect();
    for (k, target) in targets.into_iter().enumerate() {
        let (raw, fixed, err) = match target {
            Some(ch) => {
                let plan = correction_plan(Classification::Channel(ch), code.basis())?;
                (
                    pipe.output_state(None, Some((ch, moments)))?,
                    pipe.output_state(Some(&plan), Some((ch, moments)))?,
                    ErrorConfig { gamma: 1.0, channel: ChannelPolicy::Fixed(ch), ..cfg.error },
                )
            }
            None => {
                let clean = pipe.output_state(None, None)?;
                (clean.clone(), clean, ErrorConfig { gamma: 0.0, ..cfg.error })
            }
        };
        let stream = 2 * k as u32;
        let raw_mc = run_shots(pool, &ShotSampler::new(code, &err, false)?, shots, cfg.seed, stream)?;
        let fixed_mc = run_shots(pool, &ShotSampler::new(code, &err, true)?, shots, cfg.seed, stream + 1)?;
        let (rx, rp) = raw.quadrature_variances(0);
        let (fx, fp) = fixed.quadrature_variances(0);
        for (q, name, r, f) in [(0, "x", rx, fx), (1, "p", rp, fp)] {
            rows.push(SpectrumRow {
                channel: target.map_or("none".into(), |c| c.to_string()),
                quadrature: name,
                uncorrected_theory_db: variance_to_db(r)?,
                corrected_theory_db: variance_to_db(f)?,
                uncorrected_mc_db: variance_to_db(raw_mc.variance[q])?,
                corrected_mc_db: variance_to_db(fixed_mc.variance[q])?,
            });
        }
    }
    let csv = cfg.out.join("spectra.csv");
    let json = cfg.out.join("spectra.json");
    write_csv(&csv, &rows)?;
    write_json(&json, &Report { experiment: "spectra", config: cfg.into(), shots_per_row: shots, rows: &rows })?;
    let lines = rows
        .iter()
        .map(|r| {
            format!(
                "channel {:<4} {}: uncorrected {:6.2} dB, corrected {:6.2} dB",
                r.channel, r.quadrature, r.uncorrected_theory_db, r.corrected_theory_db
            )
        })
        .collect();
    Ok(RunSummary { files: vec![csv, json], lines })
}
