//! Numeric phase-space pipeline, kept alongside the symbolic forms.

use nalgebra::{DMatrix, DVector, SMatrix, SVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::syndrome::SyndromeTrace;
use super::{Basis, Channel, CodeConfig, CorrectionPlan, Detector, LossConfig, QecError, SymbolicCode, OUTPUT_SLOT};
use crate::algebra::{form_apply_matrix, LinearForm, QuadSymbol, Quadrature};
use crate::error_channel::ErrorEvent;
use crate::gaussian::{fidelity_gaussian, GaussianState};
use crate::network::{encoder_matrix, lift_to_symplectic, INPUT_SLOT, MODES};

const DIM: usize = 2 * MODES;

/// Five encoded carriers.
#[derive(Debug, Clone)]
pub struct EncodedState {
    pub basis: Basis,
    pub loss: LossConfig,
    /// Physical forms of `c1..c5`, `[x, p]`.
    pub forms: [Vec<LinearForm>; 2],
    pub state: GaussianState,
}

/// Decoded modes `(d1, d2, d3, d_out, d4)`.
#[derive(Debug, Clone)]
pub struct DecodedState {
    pub basis: Basis,
    /// Physical forms, `[x, p]`. They ignore loss.
    pub forms: [Vec<LinearForm>; 2],
    pub state: GaussianState,
}

impl DecodedState {
    pub fn readout_form(&self, det: Detector) -> &LinearForm {
        &self.forms[det.quadrature(self.basis).index()][det.slot()]
    }

    pub fn readout_mean(&self, det: Detector) -> f64 {
        self.state.mean()[readout_index(det, self.basis)]
    }

    pub fn output_state(&self) -> Result<GaussianState, QecError> {
        Ok(self.state.marginal(&[OUTPUT_SLOT])?)
    }
}

fn initial_state(cfg: &CodeConfig) -> Result<GaussianState, QecError> {
    let mut parts = Vec::with_capacity(MODES);
    for slot in 0..MODES {
        parts.push(match slot {
            INPUT_SLOT => cfg.input_state()?,
            s if s < INPUT_SLOT => cfg.ancilla_state(s + 1)?,
            s => cfg.ancilla_state(s)?,
        });
    }
    Ok(GaussianState::direct_sum(&parts))
}

fn fourier_flags(basis: Basis) -> [bool; MODES] {
    let on = basis == Basis::Fourier;
    let mut flags = [on; MODES];
    flags[INPUT_SLOT] = false;
    flags
}

pub fn encode(cfg: &CodeConfig) -> Result<EncodedState, QecError> {
    cfg.validate()?;
    let basis = cfg.basis();
    let op = lift_to_symplectic(&encoder_matrix(), &fourier_flags(basis))?;
    let state = initial_state(cfg)?.apply(&op)?;
    let code = SymbolicCode::new();
    let forms = [code.encoded_physical(Quadrature::X, basis), code.encoded_physical(Quadrature::P, basis)];
    Ok(EncodedState { basis, loss: cfg.loss, forms, state })
}

/// Displaces the hit carrier and appends unit error symbols to its forms.
pub fn inject_error(enc: &EncodedState, event: &ErrorEvent) -> Result<EncodedState, QecError> {
    let Some(channel) = event.channel.filter(|_| event.occurred) else {
        return Ok(enc.clone());
    };
    let k = channel.slot();
    let mut d = DVector::zeros(DIM);
    d[2 * k] = event.dx;
    d[2 * k + 1] = event.dp;
    let mut out = enc.clone();
    out.state = enc.state.displace(&d)?;
    for q in [Quadrature::X, Quadrature::P] {
        let f = &mut out.forms[q.index()][k];
        *f = f.clone() + LinearForm::symbol(QuadSymbol::error(channel.number(), q));
    }
    Ok(out)
}

/// Channel loss, then the inverse network, then detection loss.
pub fn decode(enc: &EncodedState) -> Result<DecodedState, QecError> {
    let mut state = enc.state.clone();
    for m in 0..MODES {
        state = state.loss_channel(m, enc.loss.channel)?;
    }
    let decoder = encoder_matrix().transpose();
    state = state.apply(&lift_to_symplectic(&decoder, &[false; MODES])?)?;
    for m in 0..MODES {
        state = state.loss_channel(m, enc.loss.detection)?;
    }
    let forms = [
        form_apply_matrix(&enc.forms[0], &decoder)?,
        form_apply_matrix(&enc.forms[1], &decoder)?,
    ];
    Ok(DecodedState { basis: enc.basis, forms, state })
}

/// Phase-space index of a detector's readout in the decoded state.
pub fn readout_index(det: Detector, basis: Basis) -> usize {
    2 * det.slot() + det.quadrature(basis).index()
}

/// Second-order description of an error displacement on one carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMoments {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl ErrorMoments {
    pub fn fixed(dx: f64, dp: f64) -> Self {
        Self { mean: [dx, dp], cov: [[0.0; 2]; 2] }
    }
}

/// Precomputed linear response of the decoded modes, for fast sampling and
/// closed-form moments.
#[derive(Debug, Clone)]
pub struct CodePipeline {
    config: CodeConfig,
    basis: Basis,
    input: GaussianState,
    decoded: GaussianState,
    factor: SMatrix<f64, DIM, DIM>,
    /// Decoded mean per unit displacement: `response[channel][quadrature]`.
    response: [[SVector<f64, DIM>; 2]; MODES],
}

impl CodePipeline {
    pub fn new(cfg: &CodeConfig, basis: Basis) -> Result<Self, QecError> {
        let cfg = cfg.with_basis(basis);
        let enc = encode(&cfg)?;
        let decoded = decode(&enc)?.state;
        let sampler = decoded.sampler()?;
        let factor = SMatrix::<f64, DIM, DIM>::from_iterator(sampler.factor().iter().copied());
        let mut response = [[SVector::zeros(); 2]; MODES];
        let probe = EncodedState { state: GaussianState::vacuum(MODES), ..enc };
        for ch in Channel::ALL {
            for q in [Quadrature::X, Quadrature::P] {
                let (dx, dp) = if q == Quadrature::X { (1.0, 0.0) } else { (0.0, 1.0) };
                let ev = ErrorEvent { occurred: true, channel: Some(ch), dx, dp };
                let mean = decode(&inject_error(&probe, &ev)?)?.state.mean().clone();
                response[ch.slot()][q.index()] = SVector::from_iterator(mean.iter().copied());
            }
        }
        Ok(Self { input: cfg.input_state()?, config: cfg, basis, decoded, factor, response })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn config(&self) -> &CodeConfig {
        &self.config
    }

    pub fn input(&self) -> &GaussianState {
        &self.input
    }

    /// Error-free decoded state.
    pub fn decoded(&self) -> &GaussianState {
        &self.decoded
    }

    pub fn response(&self, channel: Channel, q: Quadrature) -> &SVector<f64, DIM> {
        &self.response[channel.slot()][q.index()]
    }

    /// Readout variances without any error.
    pub fn baselines(&self) -> [f64; 4] {
        Detector::ALL.map(|d| {
            let i = readout_index(d, self.basis);
            self.decoded.cov()[(i, i)]
        })
    }

    /// Output map `2 × 10` for a plan (or the bare output for `None`).
    fn output_map(&self, plan: Option<&CorrectionPlan>) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(2, DIM);
        for q in [Quadrature::X, Quadrature::P] {
            let row = q.index();
            l[(row, 2 * OUTPUT_SLOT + row)] = 1.0;
            if let Some(ff) = plan.and_then(|p| p.feedforward(q)) {
                l[(row, readout_index(ff.detector, self.basis))] += ff.gain.to_f64();
            }
        }
        l
    }

    /// Exact Gaussian moments of the (corrected) output when `error` acts
    /// with the given first and second moments.
    pub fn output_state(
        &self,
        plan: Option<&CorrectionPlan>,
        error: Option<(Channel, ErrorMoments)>,
    ) -> Result<GaussianState, QecError> {
        let l = self.output_map(plan);
        let mut mean = self.decoded.mean().clone();
        let mut cov = self.decoded.cov().clone();
        if let Some((ch, m)) = error {
            let k = DMatrix::from_fn(DIM, 2, |i, j| self.response[ch.slot()][j][i]);
            mean += &k * DVector::from_row_slice(&m.mean);
            let c = DMatrix::from_fn(2, 2, |i, j| m.cov[i][j]);
            cov += &k * c * k.transpose();
        }
        let mut out_cov = &l * &cov * l.transpose();
        // Anti-squeezed ancilla noise cancels in the output; at strong
        // squeezing the leftover rounding can dip below the uncertainty bound.
        let rounding = 64.0 * f64::EPSILON * cov.amax();
        let margin = GaussianState::new_unchecked(DVector::zeros(2), out_cov.clone())?.uncertainty_margin();
        if margin < 0.0 && -margin <= rounding {
            out_cov += DMatrix::identity(2, 2) * -margin;
        }
        let out = GaussianState::new_unchecked(&l * mean, out_cov)?;
        out.check_physical()?;
        Ok(out)
    }

    /// Draws `n` samples of the readouts and the bare output. The error on
    /// `channel`, if any, is redrawn per sample by `displacement`.
    pub fn sample_trace<R: Rng + ?Sized>(
        &self,
        channel: Option<Channel>,
        mut displacement: impl FnMut(usize, &mut R) -> [f64; 2],
        n: usize,
        rng: &mut R,
    ) -> SyndromeTrace {
        let idx = Detector::ALL.map(|d| readout_index(d, self.basis));
        let mut readouts = Vec::with_capacity(n);
        let mut outputs = Vec::with_capacity(n);
        let mean = SVector::<f64, DIM>::from_iterator(self.decoded.mean().iter().copied());
        for j in 0..n {
            let z = SVector::<f64, DIM>::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
            let mut v = mean + self.factor * z;
            if let Some(ch) = channel {
                let [dx, dp] = displacement(j, rng);
                let r = &self.response[ch.slot()];
                v += r[0] * dx + r[1] * dp;
            }
            readouts.push(idx.map(|i| v[i]));
            outputs.push([v[2 * OUTPUT_SLOT], v[2 * OUTPUT_SLOT + 1]]);
        }
        SyndromeTrace { basis: self.basis, readouts, outputs }
    }
}

/// Output noise and fidelity from the residual-noise formulas of a lossless
/// code: the corrected output is the input plus independent ancilla noise.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OutputStatistics {
    pub variance: [f64; 2],
    pub fidelity: f64,
}

pub fn closed_form_output(cfg: &CodeConfig, channel: Option<Channel>) -> Result<OutputStatistics, QecError> {
    cfg.validate()?;
    let (vx, vp) = cfg.input_variances()?;
    let (mixed, d2) = match channel.map(Channel::number) {
        Some(3) => (2.0 / 3.0 * cfg.squeezed_variance(3), 2.0 * cfg.squeezed_variance(2)),
        Some(4 | 5) => (2.0 / 3.0 * cfg.squeezed_variance(4), 8.0 * cfg.squeezed_variance(2)),
        _ => (0.0, 0.0),
    };
    let (ex, ep) = match cfg.basis() {
        Basis::Standard => (mixed, d2),
        Basis::Fourier => (d2, mixed),
    };
    let variance = [vx + ex, vp + ep];
    let out = GaussianState::new(DVector::zeros(2), DMatrix::from_diagonal(&DVector::from_row_slice(&variance)))?;
    let fidelity = fidelity_gaussian(&cfg.input_state()?, &out)?;
    Ok(OutputStatistics { variance, fidelity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::form_variance;
    use crate::qec::correction_plan;
    use crate::qec::Classification;

    fn cfg() -> CodeConfig {
        CodeConfig::with_squeezing_db(-3.5).squeezed_input()
    }

    #[test]
    fn numeric_covariance_matches_symbolic_variances() {
        for basis in [Basis::Standard, Basis::Fourier] {
            let c = cfg().with_basis(basis);
            let enc = encode(&c).unwrap();
            let model = c.variance_model().unwrap();
            for k in 0..MODES {
                let (vx, vp) = enc.state.quadrature_variances(k);
                assert!((vx - form_variance(&enc.forms[0][k], &model).unwrap()).abs() < 1e-12);
                assert!((vp - form_variance(&enc.forms[1][k], &model).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_without_error_restores_input() {
        let c = cfg();
        let dec = decode(&encode(&c).unwrap()).unwrap();
        let out = dec.output_state().unwrap();
        let input = c.input_state().unwrap();
        assert!((out.cov() - input.cov()).amax() < 1e-12);
        assert!(out.mean().amax() < 1e-12);
    }

    #[test]
    fn error_means_follow_symbolic_coefficients() {
        let c = cfg();
        let ch = Channel::new(4).unwrap();
        let ev = ErrorEvent { occurred: true, channel: Some(ch), dx: 0.7, dp: -1.3 };
        let dec = decode(&inject_error(&encode(&c).unwrap(), &ev).unwrap()).unwrap();
        let value = |s: &QuadSymbol| match (s.is_error(), s.quadrature) {
            (true, Quadrature::X) => 0.7,
            (true, Quadrature::P) => -1.3,
            _ => 0.0,
        };
        for d in Detector::ALL {
            let sym = dec.readout_form(d).evaluate(value);
            assert!((sym - dec.readout_mean(d)).abs() < 1e-12);
        }
    }

    #[test]
    fn pipeline_output_matches_closed_form() {
        for basis in [Basis::Standard, Basis::Fourier] {
            let c = cfg().with_basis(basis);
            let pipe = CodePipeline::new(&c, basis).unwrap();
            for ch in Channel::ALL {
                let plan = correction_plan(Classification::Channel(ch), basis).unwrap();
                let out = pipe.output_state(Some(&plan), Some((ch, ErrorMoments::fixed(2.0, -3.0)))).unwrap();
                let cf = closed_form_output(&c, Some(ch)).unwrap();
                let (vx, vp) = out.quadrature_variances(0);
                assert!((vx - cf.variance[0]).abs() < 1e-12, "{ch} {basis:?}");
                assert!((vp - cf.variance[1]).abs() < 1e-12, "{ch} {basis:?}");
                assert!(out.mean().amax() < 1e-12);
            }
        }
    }
}
