//! Shot-level sampling of the corrected output and its sample statistics.
//!
//! A shot is one error draw followed by one joint sample of the decoded
//! modes. The feedforward is chosen from the true error channel, so the
//! estimates isolate the correction from the classifier.

use rand::Rng;
use serde::Serialize;

use super::{apply_correction, correction_plan, Basis, Channel, Classification, CodeConfig, CodePipeline, CorrectionPlan};
use crate::error_channel::{sample_error, ErrorChannelError, ErrorConfig, ErrorEvent};
use crate::gaussian::{fidelity_gaussian, GaussianState, VACUUM_VARIANCE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    pub event: ErrorEvent,
    /// Output `(x, p)` after the feedforward (or bare, if uncorrected).
    pub output: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct ShotSampler {
    err: ErrorConfig,
    pipe: CodePipeline,
    plans: Option<Vec<CorrectionPlan>>,
}

impl ShotSampler {
    pub fn new(cfg: &CodeConfig, err: &ErrorConfig, corrected: bool) -> Result<Self, ErrorChannelError> {
        err.validate()?;
        let basis: Basis = cfg.basis();
        let plans = if corrected {
            Some(
                Channel::ALL
                    .iter()
                    .map(|&c| correction_plan(Classification::Channel(c), basis))
                    .collect::<Result<_, _>>()?,
            )
        } else {
            None
        };
        Ok(Self { err: *err, pipe: CodePipeline::new(cfg, basis)?, plans })
    }

    pub fn pipeline(&self) -> &CodePipeline {
        &self.pipe
    }

    pub fn shot<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Shot, ErrorChannelError> {
        let event = sample_error(&self.err, rng)?;
        let channel = event.channel.filter(|_| event.occurred);
        let d = [event.dx, event.dp];
        let trace = self.pipe.sample_trace(channel, |_, _: &mut R| d, 1, rng);
        let (out, readouts) = (trace.outputs[0], trace.readouts[0]);
        let output = match (&self.plans, channel) {
            (Some(plans), Some(c)) => apply_correction(&plans[c.slot()], out, readouts),
            _ => out,
        };
        Ok(Shot { event, output })
    }
}

/// Sample mean and variance per quadrature with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: [f64; 2],
    pub variance: [f64; 2],
    pub mean_se: [f64; 2],
    /// From the sample fourth central moment, so it holds for non-Gaussian
    /// samples too.
    pub variance_se: [f64; 2],
}

impl SampleSummary {
    /// Needs at least two samples.
    pub fn from_samples(samples: &[[f64; 2]]) -> Option<Self> {
        let count = samples.len();
        if count < 2 {
            return None;
        }
        let n = count as f64;
        let mut out = Self { count, mean: [0.0; 2], variance: [0.0; 2], mean_se: [0.0; 2], variance_se: [0.0; 2] };
        for q in 0..2 {
            let mean = samples.iter().map(|s| s[q]).sum::<f64>() / n;
            let (mut m2, mut m4) = (0.0, 0.0);
            for s in samples {
                let d = s[q] - mean;
                m2 += d * d;
                m4 += d.powi(4);
            }
            let variance = m2 / (n - 1.0);
            let (m2, m4) = (m2 / n, m4 / n);
            out.mean[q] = mean;
            out.variance[q] = variance;
            out.mean_se[q] = (variance / n).sqrt();
            out.variance_se[q] = ((m4 - m2 * m2).max(0.0) / n).sqrt();
        }
        Some(out)
    }

    /// Diagonal Gaussian with the sample moments. Sampling noise can put the
    /// estimate of a pure output below the uncertainty bound; both variances
    /// are then scaled up onto the bound, keeping their ratio.
    pub fn to_state(&self) -> Result<GaussianState, crate::gaussian::GaussianError> {
        let [vx, vp] = self.variance;
        let product = vx * vp;
        let bound = VACUUM_VARIANCE * VACUUM_VARIANCE;
        let lift = if product > 0.0 && product < bound { (bound / product).sqrt() } else { 1.0 };
        GaussianState::new(
            nalgebra::DVector::from_row_slice(&self.mean),
            nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[vx * lift, vp * lift])),
        )
    }

    pub fn fidelity_with(&self, input: &GaussianState) -> Result<f64, crate::gaussian::GaussianError> {
        fidelity_gaussian(input, &self.to_state()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error_channel::DisplacementLaw;
    use crate::qec::substream;

    #[test]
    fn summary_of_a_known_sample() {
        let s = SampleSummary::from_samples(&[[1.0, 0.0], [3.0, 0.0], [5.0, 0.0]]).unwrap();
        assert_eq!(s.mean, [3.0, 0.0]);
        assert_eq!(s.variance, [4.0, 0.0]);
        assert!((s.mean_se[0] - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(SampleSummary::from_samples(&[[0.0; 2]]).is_none());
    }

    #[test]
    fn sub_bound_estimates_are_lifted_onto_the_bound() {
        let s = SampleSummary { count: 10, mean: [0.0; 2], variance: [0.5, 0.1], mean_se: [0.0; 2], variance_se: [0.0; 2] };
        let (vx, vp) = s.to_state().unwrap().quadrature_variances(0);
        assert!((vx * vp - 1.0 / 16.0).abs() < 1e-15);
        assert!((vx / vp - 5.0).abs() < 1e-12);
        let wide = SampleSummary { variance: [0.5, 0.3], ..s };
        assert_eq!(wide.to_state().unwrap().quadrature_variances(0), (0.5, 0.3));
    }

    #[test]
    fn uncorrected_shots_carry_the_error() {
        let cfg = CodeConfig::with_r(3.0);
        let err = ErrorConfig::certain(Channel::new(3).unwrap(), DisplacementLaw::XOnly { spread: Default::default() }, 4.0);
        let raw = ShotSampler::new(&cfg, &err, false).unwrap();
        let fixed = ShotSampler::new(&cfg, &err, true).unwrap();
        let a = raw.shot(&mut substream(5, 0)).unwrap();
        let b = fixed.shot(&mut substream(5, 0)).unwrap();
        assert_eq!(a.event, b.event);
        // same noise draw; the correction removes dx/√3 from x
        assert!((a.output[0] - b.output[0] - a.event.dx / 3f64.sqrt()).abs() < 0.05);
    }
}
