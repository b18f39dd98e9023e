use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::symbolic::sqrt_two_thirds;
use super::{Basis, Classification, Detector, QecError};
use crate::algebra::Quadrature;
use crate::exact::ExactScalar;

/// Adds `gain × readout(detector)` to one output quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Feedforward {
    pub detector: Detector,
    pub gain: ExactScalar,
}

impl Serialize for Feedforward {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Feedforward", 3)?;
        st.serialize_field("detector", &self.detector)?;
        st.serialize_field("gain", &self.gain.to_f64())?;
        st.serialize_field("gain_exact", &self.gain.to_string())?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorrectionPlan {
    pub basis: Basis,
    pub x: Option<Feedforward>,
    pub p: Option<Feedforward>,
}

impl CorrectionPlan {
    pub fn identity(basis: Basis) -> Self {
        Self { basis, x: None, p: None }
    }

    pub fn feedforward(&self, q: Quadrature) -> Option<Feedforward> {
        match q {
            Quadrature::X => self.x,
            Quadrature::P => self.p,
        }
    }

    pub fn set(&mut self, q: Quadrature, ff: Option<Feedforward>) {
        match q {
            Quadrature::X => self.x = ff,
            Quadrature::P => self.p = ff,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_none() && self.p.is_none()
    }
}

/// Tabulated correction for a classification.
///
/// Channels 1 and 2 need none: their errors never reach the output.
pub fn correction_plan(class: Classification, basis: Basis) -> Result<CorrectionPlan, QecError> {
    let k = match class {
        Classification::NoError => return Ok(CorrectionPlan::identity(basis)),
        Classification::Channel(c) => c.number(),
        other => return Err(QecError::NoPlan(other)),
    };
    let mut plan = CorrectionPlan::identity(basis);
    if k <= 2 {
        return Ok(plan);
    }
    let s2 = ExactScalar::sqrt2();
    let two_s2 = s2 * ExactScalar::integer(2);
    let local = |detector, gain| Some(Feedforward { detector, gain });
    // (quadrature-preserving term, D2 term)
    let (mixed, d2_gain) = match k {
        3 => (local(Detector::D3, sqrt_two_thirds()), -s2),
        4 => (local(Detector::D4, sqrt_two_thirds()), two_s2),
        _ => (local(Detector::D4, -sqrt_two_thirds()), two_s2),
    };
    let d2 = local(Detector::D2, d2_gain);
    match basis {
        Basis::Standard => {
            plan.x = mixed;
            plan.p = d2;
        }
        Basis::Fourier => {
            plan.x = d2;
            plan.p = mixed;
        }
    }
    Ok(plan)
}

/// Corrected `(x, p)` of the output given the four readouts (indexed by
/// [`Detector::index`]).
pub fn apply_correction(plan: &CorrectionPlan, output: [f64; 2], readouts: [f64; 4]) -> [f64; 2] {
    let shift = |ff: Option<Feedforward>| ff.map_or(0.0, |f| f.gain.to_f64() * readouts[f.detector.index()]);
    [output[0] + shift(plan.x), output[1] + shift(plan.p)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qec::{Channel, SymbolicCode};

    #[test]
    fn table_agrees_with_symbolic_derivation() {
        let code = SymbolicCode::new();
        for basis in [Basis::Standard, Basis::Fourier] {
            for ch in Channel::ALL {
                let table = correction_plan(Classification::Channel(ch), basis).unwrap();
                assert_eq!(table, code.derive_plan(ch, basis).unwrap(), "channel {ch} {basis:?}");
            }
        }
    }

    #[test]
    fn no_plan_for_ambiguous_results() {
        for c in [Classification::AmbiguousP, Classification::Unclassifiable] {
            assert_eq!(correction_plan(c, Basis::Standard), Err(QecError::NoPlan(c)));
        }
        assert!(correction_plan(Classification::NoError, Basis::Fourier).unwrap().is_identity());
    }

    #[test]
    fn gains_print_in_closed_form() {
        let plan = correction_plan(Classification::Channel(Channel::new(4).unwrap()), Basis::Standard).unwrap();
        let json = serde_json::to_value(plan).unwrap();
        assert_eq!(json["p"]["detector"], "D2");
        assert!((json["p"]["gain"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((json["x"]["gain"].as_f64().unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn numeric_application() {
        let plan = correction_plan(Classification::Channel(Channel::new(3).unwrap()), Basis::Standard).unwrap();
        let out = apply_correction(&plan, [1.0, 1.0], [0.0, 1.0, 2.0, 0.0]);
        assert!((out[0] - (1.0 + 2.0 * (2.0f64 / 3.0).sqrt())).abs() < 1e-15);
        assert!((out[1] - (1.0 - 2f64.sqrt())).abs() < 1e-15);
    }
}
