use serde::{Deserialize, Serialize};

use super::{Basis, QecError};
use crate::algebra::VarianceModel;
use crate::gaussian::{squeezing_from_db, GaussianState, Orientation};

/// Ancillas 1, 3, 4 are amplitude squeezed, ancilla 2 phase squeezed.
pub const ANCILLA_ORIENTATION: [Orientation; 4] = [
    Orientation::AmplitudeSqueezed,
    Orientation::PhaseSqueezed,
    Orientation::AmplitudeSqueezed,
    Orientation::AmplitudeSqueezed,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AncillaSqueezing {
    Uniform(f64),
    PerAncilla([f64; 4]),
}

impl Default for AncillaSqueezing {
    fn default() -> Self {
        Self::Uniform(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputSpec {
    #[default]
    Vacuum,
    /// Phase-squeezed input with the given noise levels in dB.
    PhaseSqueezed { squeeze_db: f64, antisqueeze_db: f64 },
}

/// Transmissivities: `channel` acts on all five carriers after the error,
/// `detection` on all five decoded modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossConfig {
    #[serde(default = "one")]
    pub channel: f64,
    #[serde(default = "one")]
    pub detection: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for LossConfig {
    fn default() -> Self {
        Self { channel: 1.0, detection: 1.0 }
    }
}

impl LossConfig {
    pub fn is_lossless(&self) -> bool {
        self.channel == 1.0 && self.detection == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    #[serde(default)]
    pub ancilla_r: AncillaSqueezing,
    #[serde(default)]
    pub input: InputSpec,
    #[serde(default)]
    pub fourier_mode: bool,
    #[serde(default)]
    pub loss: LossConfig,
}

impl CodeConfig {
    /// Coherent (unsqueezed) ancillas, vacuum input.
    pub fn coherent() -> Self {
        Self::default()
    }

    pub fn with_r(r: f64) -> Self {
        Self { ancilla_r: AncillaSqueezing::Uniform(r), ..Self::default() }
    }

    /// Ancillas squeezed to `db` below shot noise (e.g. `-3.5`).
    pub fn with_squeezing_db(db: f64) -> Self {
        Self::with_r(squeezing_from_db(db))
    }

    pub fn input(mut self, input: InputSpec) -> Self {
        self.input = input;
        self
    }

    pub fn squeezed_input(self) -> Self {
        self.input(InputSpec::PhaseSqueezed { squeeze_db: -3.5, antisqueeze_db: 8.9 })
    }

    pub fn basis(&self) -> Basis {
        if self.fourier_mode {
            Basis::Fourier
        } else {
            Basis::Standard
        }
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.fourier_mode = basis == Basis::Fourier;
        self
    }

    pub fn ancilla_r(&self) -> [f64; 4] {
        match self.ancilla_r {
            AncillaSqueezing::Uniform(r) => [r; 4],
            AncillaSqueezing::PerAncilla(rs) => rs,
        }
    }

    pub fn validate(&self) -> Result<(), QecError> {
        for r in self.ancilla_r() {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(QecError::Config(format!("ancilla squeezing r = {r} must be finite and ≥ 0")));
            }
        }
        for (name, eta) in [("channel", self.loss.channel), ("detection", self.loss.detection)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(QecError::Config(format!("{name} transmissivity {eta} outside [0, 1]")));
            }
        }
        if let InputSpec::PhaseSqueezed { squeeze_db, antisqueeze_db } = self.input {
            if squeeze_db + antisqueeze_db < -1e-9 {
                return Err(QecError::Config(format!(
                    "input {squeeze_db} dB / {antisqueeze_db} dB violates the uncertainty relation"
                )));
            }
        }
        Ok(())
    }

    pub fn input_state(&self) -> Result<GaussianState, QecError> {
        Ok(match self.input {
            InputSpec::Vacuum => GaussianState::vacuum(1),
            InputSpec::PhaseSqueezed { squeeze_db, antisqueeze_db } => {
                GaussianState::squeezed_from_db(squeeze_db, antisqueeze_db, Orientation::PhaseSqueezed)?
            }
        })
    }

    pub fn input_variances(&self) -> Result<(f64, f64), QecError> {
        Ok(self.input_state()?.quadrature_variances(0))
    }

    /// Ancilla `m` (1..=4) before any Fourier rotation.
    pub fn ancilla_state(&self, m: usize) -> Result<GaussianState, QecError> {
        let r = self.ancilla_r()[m - 1];
        Ok(GaussianState::squeezed_vacuum(r, ANCILLA_ORIENTATION[m - 1], 0.0)?)
    }

    pub fn variance_model(&self) -> Result<VarianceModel, QecError> {
        Ok(VarianceModel { ancilla_r: self.ancilla_r(), input: self.input_variances()? })
    }

    /// Squeezed-quadrature variance `(1/4)e^{-2r_m}` of ancilla `m`.
    pub fn squeezed_variance(&self, m: usize) -> f64 {
        0.25 * (-2.0 * self.ancilla_r()[m - 1]).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let cfg = CodeConfig::with_squeezing_db(-3.5).squeezed_input();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: CodeConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let per: CodeConfig = serde_json::from_str(r#"{"ancilla_r":[0.1,0.2,0.3,0.4]}"#).unwrap();
        assert_eq!(per.ancilla_r(), [0.1, 0.2, 0.3, 0.4]);
        assert!(serde_json::from_str::<CodeConfig>(r#"{"ancilla_r":0.4,"bogus":1}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(CodeConfig::with_r(-1.0).validate().is_err());
        let mut lossy = CodeConfig::coherent();
        lossy.loss.channel = 1.5;
        assert!(lossy.validate().is_err());
        let bad_input = CodeConfig::coherent().input(InputSpec::PhaseSqueezed { squeeze_db: -6.0, antisqueeze_db: 3.0 });
        assert!(bad_input.validate().is_err());
        assert!(CodeConfig::with_squeezing_db(-3.5).squeezed_input().validate().is_ok());
    }

    #[test]
    fn squeezing_db_matches_variance() {
        let cfg = CodeConfig::with_squeezing_db(-3.5);
        assert!((cfg.squeezed_variance(2) / 0.25 - 10f64.powf(-0.35)).abs() < 1e-14);
        let a2 = cfg.ancilla_state(2).unwrap();
        assert!((a2.quadrature_variances(0).1 - cfg.squeezed_variance(2)).abs() < 1e-15);
    }
}
