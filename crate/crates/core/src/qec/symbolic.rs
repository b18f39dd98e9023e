//! Exact Heisenberg-picture bookkeeping for the code.
//!
//! Mode-level forms use bare symbols (`a1`, `a_in`, `e3`, ...). The
//! `physical` variants replace each bare ancilla quadrature by its squeezed
//! vacuum symbol, after the optional Fourier rotation.

use super::{Basis, Channel, CorrectionPlan, Detector, Feedforward, QecError, ANCILLA_ORIENTATION, OUTPUT_SLOT};
use crate::algebra::{form_apply_matrix, Attenuation, LinearForm, ModeLabel, QuadSymbol, Quadrature};
use crate::exact::ExactScalar;
use crate::gaussian::Orientation;
use crate::network::{encoder_matrix, inverse, ModeMatrix, INPUT_SLOT, MODES};

#[derive(Debug, Clone)]
pub struct SymbolicCode {
    encoder: ModeMatrix,
    decoder: ModeMatrix,
}

impl Default for SymbolicCode {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolicCode {
    pub fn new() -> Self {
        let encoder = encoder_matrix();
        let decoder = inverse(&encoder).expect("encoder is orthogonal");
        Self { encoder, decoder }
    }

    pub fn encoder(&self) -> &ModeMatrix {
        &self.encoder
    }

    pub fn decoder(&self) -> &ModeMatrix {
        &self.decoder
    }

    /// `q` quadratures of the input ports `(a1, a2, a3, a_in, a4)`.
    pub fn inputs(q: Quadrature) -> Vec<LinearForm> {
        (0..MODES)
            .map(|slot| {
                let sym = match slot {
                    INPUT_SLOT => QuadSymbol::input(q),
                    s if s < INPUT_SLOT => QuadSymbol::ancilla(s as u8 + 1, q),
                    s => QuadSymbol::ancilla(s as u8, q),
                };
                LinearForm::symbol(sym)
            })
            .collect()
    }

    /// `c1..c5` in bare symbols.
    pub fn encoded(&self, q: Quadrature) -> Vec<LinearForm> {
        form_apply_matrix(&Self::inputs(q), &self.encoder).expect("five forms")
    }

    /// `c_k + e_k` for every channel.
    pub fn encoded_with_errors(&self, q: Quadrature) -> Vec<LinearForm> {
        self.encoded(q)
            .into_iter()
            .enumerate()
            .map(|(k, c)| c + LinearForm::symbol(QuadSymbol::error(k as u8 + 1, q)))
            .collect()
    }

    /// Decoded modes `(d1, d2, d3, d_out, d4)` in bare symbols, errors included.
    pub fn decoded(&self, q: Quadrature) -> Vec<LinearForm> {
        form_apply_matrix(&self.encoded_with_errors(q), &self.decoder).expect("five forms")
    }

    /// Replaces bare ancilla quadratures by attenuated vacuum symbols.
    pub fn physical(form: &LinearForm, basis: Basis) -> LinearForm {
        form.substitute(|s| match (s.mode, s.attenuation) {
            (ModeLabel::Ancilla(m), Attenuation::None) => Some(ancilla_quadrature(m, s.quadrature, basis)),
            _ => None,
        })
    }

    pub fn encoded_physical(&self, q: Quadrature, basis: Basis) -> Vec<LinearForm> {
        self.encoded(q).iter().map(|f| Self::physical(f, basis)).collect()
    }

    pub fn decoded_physical(&self, q: Quadrature, basis: Basis) -> Vec<LinearForm> {
        self.decoded(q).iter().map(|f| Self::physical(f, basis)).collect()
    }

    /// What detector `det` records, as a physical form.
    pub fn readout(&self, det: Detector, basis: Basis) -> LinearForm {
        let q = det.quadrature(basis);
        Self::physical(&self.decoded(q)[det.slot()], basis)
    }

    /// The uncorrected output quadrature.
    pub fn output(&self, q: Quadrature, basis: Basis) -> LinearForm {
        Self::physical(&self.decoded(q)[OUTPUT_SLOT], basis)
    }

    pub fn corrected_output(&self, plan: &CorrectionPlan, q: Quadrature) -> LinearForm {
        let mut out = self.output(q, plan.basis);
        if let Some(ff) = plan.feedforward(q) {
            out = out + self.readout(ff.detector, plan.basis).scale(ff.gain);
        }
        out
    }

    /// Feedforward that cancels the error on `channel` from the output.
    ///
    /// For each quadrature the detector carrying the largest error
    /// coefficient is used, with gain `−coef_out / coef_det`.
    pub fn derive_plan(&self, channel: Channel, basis: Basis) -> Result<CorrectionPlan, QecError> {
        let k = channel.number();
        let mut plan = CorrectionPlan::identity(basis);
        for q in [Quadrature::X, Quadrature::P] {
            let err = QuadSymbol::error(k, q);
            let coef_out = self.output(q, basis).coeff(&err);
            if coef_out.is_zero() {
                continue;
            }
            let best = Detector::ALL
                .into_iter()
                .filter(|d| d.quadrature(basis) == q)
                .map(|d| (d, self.readout(d, basis).coeff(&err)))
                .filter(|(_, c)| !c.is_zero())
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("exact comparison"));
            let (detector, coef_det) = best.ok_or(QecError::Config(format!(
                "error on channel {channel} {q} reaches no {q} detector"
            )))?;
            let gain = (-coef_out).checked_div(&coef_det)?;
            plan.set(q, Some(Feedforward { detector, gain }));
        }
        Ok(plan)
    }
}

fn ancilla_quadrature(m: u8, q: Quadrature, basis: Basis) -> LinearForm {
    match basis {
        Basis::Standard => {
            let squeezed = match ANCILLA_ORIENTATION[m as usize - 1] {
                Orientation::AmplitudeSqueezed => Quadrature::X,
                Orientation::PhaseSqueezed => Quadrature::P,
            };
            let att = if q == squeezed { Attenuation::Squeezed } else { Attenuation::Antisqueezed };
            LinearForm::symbol(QuadSymbol::ancilla_vacuum(m, q, att))
        }
        // rotated ancilla: x' = −p, p' = x
        Basis::Fourier => match q {
            Quadrature::X => -ancilla_quadrature(m, Quadrature::P, Basis::Standard),
            Quadrature::P => ancilla_quadrature(m, Quadrature::X, Basis::Standard),
        },
    }
}

/// Exact scalar shorthand used by the correction tables.
pub(crate) fn sqrt_two_thirds() -> ExactScalar {
    ExactScalar::sqrt6() * ExactScalar::rational(1, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{form_variance, VarianceModel};

    fn x_in() -> QuadSymbol {
        QuadSymbol::input(Quadrature::X)
    }

    #[test]
    fn error_free_output_is_the_input() {
        let code = SymbolicCode::new();
        for basis in [Basis::Standard, Basis::Fourier] {
            for q in [Quadrature::X, Quadrature::P] {
                let out = code.output(q, basis).without_errors();
                assert_eq!(out, LinearForm::symbol(QuadSymbol::input(q)));
            }
        }
    }

    #[test]
    fn syndrome_readouts_carry_no_input() {
        let code = SymbolicCode::new();
        for basis in [Basis::Standard, Basis::Fourier] {
            for d in Detector::ALL {
                let r = code.readout(d, basis);
                assert!(r.coeff(&x_in()).is_zero());
                assert!(r.coeff(&QuadSymbol::input(Quadrature::P)).is_zero());
            }
        }
    }

    #[test]
    fn standard_plans_match_the_gain_table() {
        let code = SymbolicCode::new();
        let s2 = ExactScalar::sqrt2();
        let expect = [
            (3, Detector::D3, sqrt_two_thirds(), -s2),
            (4, Detector::D4, sqrt_two_thirds(), s2 * ExactScalar::integer(2)),
            (5, Detector::D4, -sqrt_two_thirds(), s2 * ExactScalar::integer(2)),
        ];
        for (k, xdet, xg, pg) in expect {
            let plan = code.derive_plan(Channel::new(k).unwrap(), Basis::Standard).unwrap();
            assert_eq!(plan.x, Some(Feedforward { detector: xdet, gain: xg }));
            assert_eq!(plan.p, Some(Feedforward { detector: Detector::D2, gain: pg }));
        }
        for k in [1, 2] {
            let plan = code.derive_plan(Channel::new(k).unwrap(), Basis::Standard).unwrap();
            assert!(plan.x.is_none() && plan.p.is_none());
        }
    }

    #[test]
    fn corrected_output_has_no_error_symbols() {
        let code = SymbolicCode::new();
        for basis in [Basis::Standard, Basis::Fourier] {
            for ch in Channel::ALL {
                let plan = code.derive_plan(ch, basis).unwrap();
                for q in [Quadrature::X, Quadrature::P] {
                    let out = code.corrected_output(&plan, q);
                    let err = QuadSymbol::error(ch.number(), q);
                    assert!(out.coeff(&err).is_zero(), "channel {ch} {q} {basis:?}: {out}");
                }
            }
        }
    }

    #[test]
    fn residual_noise_of_channel_three() {
        let code = SymbolicCode::new();
        let plan = code.derive_plan(Channel::new(3).unwrap(), Basis::Standard).unwrap();
        let r = 0.4;
        let model = VarianceModel::uniform(r, (0.25, 0.25));
        let vx = form_variance(&code.corrected_output(&plan, Quadrature::X).without_errors(), &model).unwrap();
        let vp = form_variance(&code.corrected_output(&plan, Quadrature::P).without_errors(), &model).unwrap();
        let s = 0.25 * (-2.0 * r).exp();
        assert!((vx - (0.25 + 2.0 / 3.0 * s)).abs() < 1e-14);
        assert!((vp - (0.25 + 2.0 * s)).abs() < 1e-14);
    }
}
