//! The five-wave-packet code: encode, error, decode, syndrome, correct.

mod config;
mod correction;
mod monte_carlo;
mod pipeline;
mod round;
mod syndrome;
pub mod symbolic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Quadrature};
use crate::exact::ExactError;
use crate::gaussian::GaussianError;
use crate::network::NetworkError;

pub use config::{AncillaSqueezing, CodeConfig, InputSpec, LossConfig, ANCILLA_ORIENTATION};
pub use correction::{apply_correction, correction_plan, CorrectionPlan, Feedforward};
pub use monte_carlo::{SampleSummary, Shot, ShotSampler};
pub use pipeline::{
    closed_form_output, decode, encode, inject_error, readout_index, CodePipeline, DecodedState, EncodedState,
    ErrorMoments, OutputStatistics,
};
pub use round::{
    demo_error, run_round, substream, OutputMoments, RoundOptions, RoundReport, RoundRunner, TraceRow, TrialRng,
};
pub use symbolic::SymbolicCode;
pub use syndrome::{
    classify, closed_form_syndrome, measure_syndrome, DetectorReading, PhaseRelation, SyndromeRecord,
    SyndromeTrace, FLUCTUATION_THRESHOLD, MIN_WINDOW,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QecError {
    #[error("channel {0} outside 1..=5")]
    InvalidChannel(u8),
    #[error("syndrome window of {0} samples is below the minimum of {MIN_WINDOW}")]
    WindowTooSmall(usize),
    #[error("no correction plan for {0:?}")]
    NoPlan(Classification),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// One of the five carriers, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Channel(u8);

impl Channel {
    pub const ALL: [Channel; 5] = [Channel(1), Channel(2), Channel(3), Channel(4), Channel(5)];

    pub fn new(k: u8) -> Result<Self, QecError> {
        if (1..=5).contains(&k) {
            Ok(Self(k))
        } else {
            Err(QecError::InvalidChannel(k))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// 0-based position among the five encoded modes.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl TryFrom<u8> for Channel {
    type Error = QecError;
    fn try_from(k: u8) -> Result<Self, QecError> {
        Self::new(k)
    }
}

impl From<Channel> for u8 {
    fn from(c: Channel) -> u8 {
        c.0
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Syndrome homodyne detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Detector {
    D1,
    D2,
    D3,
    D4,
}

impl Detector {
    pub const ALL: [Detector; 4] = [Detector::D1, Detector::D2, Detector::D3, Detector::D4];

    pub fn index(self) -> usize {
        match self {
            Self::D1 => 0,
            Self::D2 => 1,
            Self::D3 => 2,
            Self::D4 => 3,
        }
    }

    /// Decoded-mode slot read by this detector; slot 3 carries the output.
    pub fn slot(self) -> usize {
        match self {
            Self::D1 => 0,
            Self::D2 => 1,
            Self::D3 => 2,
            Self::D4 => 4,
        }
    }

    /// Quadrature measured in the given basis.
    pub fn quadrature(self, basis: Basis) -> Quadrature {
        let standard = if self == Self::D2 { Quadrature::P } else { Quadrature::X };
        match basis {
            Basis::Standard => standard,
            Basis::Fourier => standard.other(),
        }
    }
}

/// Slot of the decoded output mode.
pub const OUTPUT_SLOT: usize = 3;

/// Whether the ancillas were rotated by 90° before encoding, which swaps the
/// quadratures read by every detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    #[default]
    Standard,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    NoError,
    Channel(Channel),
    /// Only D2's p readout fluctuates: a pure p displacement on an unknown channel.
    AmbiguousP,
    Unclassifiable,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NoError => f.write_str("no error"),
            Self::Channel(ch) => write!(f, "channel {ch}"),
            Self::AmbiguousP => f.write_str("p error, channel unknown"),
            Self::Unclassifiable => f.write_str("unclassifiable"),
        }
    }
}
