//! One full correction round: error, syndrome window, classification,
//! optional rotated rerun, feedforward.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::syndrome::SyndromeTrace;
use super::{
    apply_correction, classify, correction_plan, measure_syndrome, Basis, Channel, Classification, CodeConfig,
    CodePipeline, CorrectionPlan, QecError, SyndromeRecord, MIN_WINDOW,
};
use crate::error_channel::{sample_error, ErrorChannelError, ErrorConfig, ErrorEvent};
use crate::gaussian::{fidelity_gaussian, GaussianState};

/// Generator behind every seeded run.
pub type TrialRng = ChaCha8Rng;

/// Independent generator for trial `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundOptions {
    /// Samples per syndrome window.
    pub window: usize,
    /// Keep per-sample readouts in the report.
    pub keep_traces: bool,
}

impl Default for RoundOptions {
    fn default() -> Self {
        Self { window: 256, keep_traces: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputMoments {
    pub mean: [f64; 2],
    pub variance: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub index: usize,
    pub readouts: [f64; 4],
    pub corrected: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundReport {
    pub event: ErrorEvent,
    pub first_pass: Classification,
    pub classification: Classification,
    pub fourier_rerun: bool,
    /// Basis of the window the correction was taken from.
    pub basis: Basis,
    pub matched: bool,
    pub syndrome: SyndromeRecord,
    pub plan: Option<CorrectionPlan>,
    /// Sample moments of the corrected output over the window.
    pub output: OutputMoments,
    /// Gaussian moments predicted for the same correction.
    pub theory: OutputMoments,
    /// Fidelity of the predicted output with the input.
    pub fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<TraceRow>>,
}

/// Reusable round driver; the pipelines are built once.
#[derive(Debug, Clone)]
pub struct RoundRunner {
    err: ErrorConfig,
    options: RoundOptions,
    primary: CodePipeline,
    fourier: CodePipeline,
}

impl RoundRunner {
    pub fn new(cfg: &CodeConfig, err: &ErrorConfig, options: RoundOptions) -> Result<Self, ErrorChannelError> {
        err.validate()?;
        if options.window < MIN_WINDOW {
            return Err(QecError::WindowTooSmall(options.window).into());
        }
        Ok(Self {
            err: *err,
            options,
            primary: CodePipeline::new(cfg, cfg.basis())?,
            fourier: CodePipeline::new(cfg, Basis::Fourier)?,
        })
    }

    pub fn pipeline(&self, basis: Basis) -> &CodePipeline {
        if basis == self.primary.basis() {
            &self.primary
        } else {
            &self.fourier
        }
    }

    fn window<R: Rng + ?Sized>(&self, pipe: &CodePipeline, event: &ErrorEvent, rng: &mut R) -> SyndromeTrace {
        let channel = event.channel.filter(|_| event.occurred);
        let (law, a) = (self.err.law, self.err.amplitude);
        let first = [event.dx, event.dp];
        pipe.sample_trace(channel, |j, rng: &mut R| if j == 0 { first } else { law.sample(a, rng) }, self.options.window, rng)
    }

    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RoundReport, QecError> {
        let event = match sample_error(&self.err, rng) {
            Ok(ev) => ev,
            Err(e) => return Err(QecError::Config(e.to_string())),
        };
        let mut pipe = &self.primary;
        let mut trace = self.window(pipe, &event, rng);
        let mut syndrome = measure_syndrome(&trace, pipe.baselines())?;
        let first_pass = classify(&syndrome);
        let mut classification = first_pass;
        let mut fourier_rerun = false;
        if first_pass == Classification::AmbiguousP && pipe.basis() == Basis::Standard {
            fourier_rerun = true;
            pipe = &self.fourier;
            trace = self.window(pipe, &event, rng);
            syndrome = measure_syndrome(&trace, pipe.baselines())?;
            classification = match classify(&syndrome) {
                Classification::AmbiguousP => Classification::Unclassifiable,
                c => c,
            };
        }
        let plan = correction_plan(classification, pipe.basis()).ok();
        let corrected: Vec<[f64; 2]> = trace
            .outputs
            .iter()
            .zip(&trace.readouts)
            .map(|(out, r)| match &plan {
                Some(p) => apply_correction(p, *out, *r),
                None => *out,
            })
            .collect();
        let hit = event.channel.filter(|_| event.occurred);
        let theory_state = pipe.output_state(plan.as_ref(), hit.map(|c| (c, self.err.law.moments(self.err.amplitude))))?;
        let expected = match hit {
            Some(c) if self.err.amplitude > 0.0 => Classification::Channel(c),
            _ => Classification::NoError,
        };
        let traces = self.options.keep_traces.then(|| {
            trace
                .readouts
                .iter()
                .zip(&corrected)
                .enumerate()
                .map(|(index, (r, c))| TraceRow { index, readouts: *r, corrected: *c })
                .collect()
        });
        let (vx, vp) = theory_state.quadrature_variances(0);
        Ok(RoundReport {
            event,
            first_pass,
            classification,
            fourier_rerun,
            basis: pipe.basis(),
            matched: classification == expected,
            syndrome,
            plan,
            output: sample_moments(&corrected),
            theory: OutputMoments { mean: [theory_state.mean()[0], theory_state.mean()[1]], variance: [vx, vp] },
            fidelity: fidelity_gaussian(pipe.input(), &theory_state)?,
            traces,
        })
    }
}

pub(crate) fn sample_moments(samples: &[[f64; 2]]) -> OutputMoments {
    let n = samples.len() as f64;
    let mut mean = [0.0; 2];
    for s in samples {
        mean[0] += s[0] / n;
        mean[1] += s[1] / n;
    }
    let mut variance = [0.0; 2];
    for s in samples {
        variance[0] += (s[0] - mean[0]).powi(2) / (n - 1.0);
        variance[1] += (s[1] - mean[1]).powi(2) / (n - 1.0);
    }
    OutputMoments { mean, variance }
}

impl OutputMoments {
    /// Diagonal Gaussian with these moments.
    pub fn to_state(&self) -> Result<GaussianState, QecError> {
        Ok(GaussianState::new(
            DVector::from_row_slice(&self.mean),
            DMatrix::from_diagonal(&DVector::from_row_slice(&self.variance)),
        )?)
    }
}

/// Single round with fresh pipelines.
pub fn run_round<R: Rng + ?Sized>(
    cfg: &CodeConfig,
    err: &ErrorConfig,
    options: RoundOptions,
    rng: &mut R,
) -> Result<RoundReport, ErrorChannelError> {
    Ok(RoundRunner::new(cfg, err, options)?.run(rng)?)
}

/// Fixed-channel round at amplitude `a` with the general law; convenient for
/// demos and tests.
pub fn demo_error(channel: Channel, amplitude: f64) -> ErrorConfig {
    ErrorConfig::certain(channel, crate::error_channel::DisplacementLaw::General, amplitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error_channel::{DisplacementLaw, Spread};

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: u64 = substream(1, 0).random();
        let b: u64 = substream(1, 0).random();
        let c: u64 = substream(1, 1).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn p_only_error_triggers_rotated_rerun() {
        let cfg = CodeConfig::with_squeezing_db(-3.5);
        let err = ErrorConfig::certain(Channel::new(5).unwrap(), DisplacementLaw::POnly { spread: Spread::Sign }, 3.0);
        let report = run_round(&cfg, &err, RoundOptions::default(), &mut substream(3, 0)).unwrap();
        assert_eq!(report.first_pass, Classification::AmbiguousP);
        assert!(report.fourier_rerun);
        assert_eq!(report.classification, Classification::Channel(Channel::new(5).unwrap()));
        assert!(report.matched);
    }

    #[test]
    fn small_windows_are_refused() {
        let cfg = CodeConfig::coherent();
        let opts = RoundOptions { window: 10, keep_traces: false };
        assert!(RoundRunner::new(&cfg, &demo_error(Channel::new(1).unwrap(), 1.0), opts).is_err());
    }

    #[test]
    fn report_serialises() {
        let cfg = CodeConfig::with_squeezing_db(-3.5);
        let opts = RoundOptions { window: 64, keep_traces: true };
        let report = run_round(&cfg, &demo_error(Channel::new(3).unwrap(), 3.0), opts, &mut substream(9, 2)).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["classification"]["channel"], 3);
        assert_eq!(json["traces"].as_array().unwrap().len(), 64);
    }
}
