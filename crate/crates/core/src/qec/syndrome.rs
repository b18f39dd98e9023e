//! Windowed syndrome extraction and the classification table.

use serde::Serialize;

use super::{Basis, Channel, Classification, Detector, QecError, SymbolicCode};
use crate::algebra::{form_variance, ModeLabel, Quadrature, VarianceModel};

/// Smallest window with a usable variance estimate.
pub const MIN_WINDOW: usize = 30;

/// A detector counts as fluctuating when its excess variance exceeds this
/// multiple of its error-free variance.
pub const FLUCTUATION_THRESHOLD: f64 = 3.0;

/// Raw samples from one syndrome window.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeTrace {
    pub basis: Basis,
    /// Per sample, readouts of D1..D4.
    pub readouts: Vec<[f64; 4]>,
    /// Per sample, uncorrected output `(x, p)`.
    pub outputs: Vec<[f64; 2]>,
}

impl SyndromeTrace {
    pub fn len(&self) -> usize {
        self.readouts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readouts.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseRelation {
    InPhase,
    OutOfPhase,
    /// At least one of the pair is quiet.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorReading {
    pub detector: Detector,
    pub quadrature: Quadrature,
    pub variance: f64,
    pub baseline: f64,
    pub fluctuating: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyndromeRecord {
    pub basis: Basis,
    pub detectors: [DetectorReading; 4],
    pub d1_d3: PhaseRelation,
    pub d3_d4: PhaseRelation,
}

impl SyndromeRecord {
    pub fn fluctuating(&self, det: Detector) -> bool {
        self.detectors[det.index()].fluctuating
    }

    pub fn flagged(&self) -> Vec<Detector> {
        Detector::ALL.into_iter().filter(|d| self.fluctuating(*d)).collect()
    }
}

fn relation(a: &DetectorReading, b: &DetectorReading, cov: f64) -> PhaseRelation {
    if !(a.fluctuating && b.fluctuating) {
        PhaseRelation::NotApplicable
    } else if cov >= 0.0 {
        PhaseRelation::InPhase
    } else {
        PhaseRelation::OutOfPhase
    }
}

/// Flags detectors whose windowed variance exceeds their baseline by more
/// than [`FLUCTUATION_THRESHOLD`]× and reads the sign of the pairwise
/// covariances.
pub fn measure_syndrome(trace: &SyndromeTrace, baselines: [f64; 4]) -> Result<SyndromeRecord, QecError> {
    let n = trace.len();
    if n < MIN_WINDOW {
        return Err(QecError::WindowTooSmall(n));
    }
    let nf = n as f64;
    let mut mean = [0.0; 4];
    for r in &trace.readouts {
        for i in 0..4 {
            mean[i] += r[i] / nf;
        }
    }
    let mut cov = [[0.0; 4]; 4];
    for r in &trace.readouts {
        for i in 0..4 {
            for j in i..4 {
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / (nf - 1.0);
            }
        }
    }
    let detectors = Detector::ALL.map(|d| {
        let i = d.index();
        let variance = cov[i][i];
        DetectorReading {
            detector: d,
            quadrature: d.quadrature(trace.basis),
            variance,
            baseline: baselines[i],
            fluctuating: variance - baselines[i] > FLUCTUATION_THRESHOLD * baselines[i],
        }
    });
    Ok(SyndromeRecord {
        basis: trace.basis,
        d1_d3: relation(&detectors[0], &detectors[2], cov[0][2]),
        d3_d4: relation(&detectors[2], &detectors[3], cov[2][3]),
        detectors,
    })
}

/// Noise-free syndrome for fixed displacements `(channel, dx, dp)`: a
/// detector fluctuates iff some error reaches it, and `variance` holds the
/// baseline plus the squared error contribution. More than one error models
/// simultaneous faults.
pub fn closed_form_syndrome(
    code: &SymbolicCode,
    model: &VarianceModel,
    basis: Basis,
    errors: &[(Channel, f64, f64)],
) -> Result<SyndromeRecord, QecError> {
    let mut shift = [0.0; 4];
    let mut detectors = Vec::with_capacity(4);
    for d in Detector::ALL {
        let form = code.readout(d, basis);
        let contribution = form.error_part().evaluate(|s| {
            errors
                .iter()
                .filter(|(c, _, _)| s.mode == ModeLabel::Error(c.number()))
                .map(|&(_, dx, dp)| if s.quadrature == Quadrature::X { dx } else { dp })
                .sum()
        });
        shift[d.index()] = contribution;
        let baseline = form_variance(&form.without_errors(), model)?;
        detectors.push(DetectorReading {
            detector: d,
            quadrature: d.quadrature(basis),
            variance: baseline + contribution * contribution,
            baseline,
            fluctuating: contribution != 0.0,
        });
    }
    let detectors: [DetectorReading; 4] = detectors.try_into().expect("four detectors");
    Ok(SyndromeRecord {
        basis,
        d1_d3: relation(&detectors[0], &detectors[2], shift[0] * shift[2]),
        d3_d4: relation(&detectors[2], &detectors[3], shift[2] * shift[3]),
        detectors,
    })
}

/// Maps a syndrome to the channel it identifies.
///
/// Only D1, D3 and D4 localise the error; D2 is consulted alone when the
/// other three are quiet.
pub fn classify(rec: &SyndromeRecord) -> Classification {
    let f = |d| rec.fluctuating(d);
    let ch = |k| Classification::Channel(Channel::new(k).expect("valid channel"));
    match (f(Detector::D1), f(Detector::D3), f(Detector::D4)) {
        (false, false, false) => match (f(Detector::D2), rec.basis) {
            (false, _) => Classification::NoError,
            (true, Basis::Standard) => Classification::AmbiguousP,
            (true, Basis::Fourier) => Classification::Unclassifiable,
        },
        (true, true, false) => match rec.d1_d3 {
            PhaseRelation::InPhase => ch(1),
            PhaseRelation::OutOfPhase => ch(2),
            PhaseRelation::NotApplicable => Classification::Unclassifiable,
        },
        (false, true, false) => ch(3),
        (false, true, true) => match rec.d3_d4 {
            PhaseRelation::OutOfPhase => ch(4),
            PhaseRelation::InPhase => ch(5),
            PhaseRelation::NotApplicable => Classification::Unclassifiable,
        },
        _ => Classification::Unclassifiable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> VarianceModel {
        VarianceModel::uniform(0.4, (0.25, 0.25))
    }

    fn closed(basis: Basis, k: u8, dx: f64, dp: f64) -> SyndromeRecord {
        closed_form_syndrome(&SymbolicCode::new(), &model(), basis, &[(Channel::new(k).unwrap(), dx, dp)]).unwrap()
    }

    #[test]
    fn x_errors_are_located_on_every_channel() {
        for k in 1..=5 {
            let rec = closed(Basis::Standard, k, 1.0, 0.0);
            assert_eq!(classify(&rec), Classification::Channel(Channel::new(k).unwrap()));
        }
    }

    #[test]
    fn p_errors_are_ambiguous_until_rotated() {
        for k in 1..=5 {
            let rec = closed(Basis::Standard, k, 0.0, 1.0);
            assert_eq!(classify(&rec), Classification::AmbiguousP, "channel {k}");
            let rot = closed(Basis::Fourier, k, 0.0, 1.0);
            assert_eq!(classify(&rot), Classification::Channel(Channel::new(k).unwrap()));
        }
    }

    #[test]
    fn flag_patterns() {
        let flags = |k| closed(Basis::Standard, k, 1.0, 1.0).flagged();
        use Detector::*;
        assert_eq!(flags(1), vec![D1, D2, D3]);
        assert_eq!(flags(2), vec![D1, D2, D3]);
        assert_eq!(flags(3), vec![D2, D3]);
        assert_eq!(flags(4), vec![D2, D3, D4]);
        assert_eq!(flags(5), vec![D2, D3, D4]);
        assert_eq!(closed(Basis::Standard, 1, 1.0, 0.0).d1_d3, PhaseRelation::InPhase);
        assert_eq!(closed(Basis::Standard, 2, 1.0, 0.0).d1_d3, PhaseRelation::OutOfPhase);
        assert_eq!(closed(Basis::Standard, 4, 1.0, 0.0).d3_d4, PhaseRelation::OutOfPhase);
        assert_eq!(closed(Basis::Standard, 5, 1.0, 0.0).d3_d4, PhaseRelation::InPhase);
    }

    #[test]
    fn two_simultaneous_errors_are_unclassifiable() {
        let ch = |k| Channel::new(k).unwrap();
        let rec = closed_form_syndrome(&SymbolicCode::new(), &model(), Basis::Standard, &[(ch(1), 1.0, 0.0), (ch(4), 1.0, 0.0)])
            .unwrap();
        assert_eq!(classify(&rec), Classification::Unclassifiable);
    }

    #[test]
    fn short_windows_are_rejected() {
        let trace = SyndromeTrace { basis: Basis::Standard, readouts: vec![[0.0; 4]; 29], outputs: vec![[0.0; 2]; 29] };
        assert_eq!(measure_syndrome(&trace, [0.25; 4]), Err(QecError::WindowTooSmall(29)));
    }

    #[test]
    fn unclassifiable_patterns() {
        let mut rec = closed(Basis::Standard, 1, 1.0, 0.0);
        rec.detectors[3].fluctuating = true;
        assert_eq!(classify(&rec), Classification::Unclassifiable);
        let mut only_d1 = closed(Basis::Standard, 3, 0.0, 0.0);
        only_d1.detectors[0].fluctuating = true;
        assert_eq!(classify(&only_d1), Classification::Unclassifiable);
        assert_eq!(classify(&closed(Basis::Standard, 3, 0.0, 0.0)), Classification::NoError);
    }
}
