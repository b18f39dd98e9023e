//! Simulator for the five-wave-packet continuous-variable quantum
//! error-correction code.
//!
//! An input mode is spread over five optical channels by a four-element
//! beam-splitter network, a stochastic displacement error hits one channel,
//! the inverse network decodes, four homodyne detectors read out the
//! syndrome, and a feedforward displacement removes the error from the
//! output. Everything is available twice: as exact Heisenberg-picture
//! algebra over ℚ(√2, √3) ([`algebra`], [`qec::symbolic`]) and as numeric
//! Gaussian states with Monte-Carlo sampling ([`gaussian`], [`qec`]).

pub mod algebra;
pub mod error_channel;
pub mod exact;
pub mod gaussian;
pub mod network;
pub mod qec;
pub mod witness;

pub use algebra::{LinearForm, QuadSymbol, Quadrature, VarianceModel};
pub use error_channel::{DisplacementLaw, ErrorConfig, ErrorEvent, MixtureState};
pub use exact::ExactScalar;
pub use gaussian::{fidelity_gaussian, GaussianState, SymplecticOp};
pub use network::{ModeMatrix, NetworkSpec};
pub use qec::{Channel, Classification, CodeConfig, CorrectionPlan, RoundReport, SyndromeRecord};
pub use witness::WitnessResult;
