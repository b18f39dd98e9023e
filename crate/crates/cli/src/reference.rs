//! Measured reference values the tables are compared against.

use cvqec_core::qec::CodeConfig;
use serde::Serialize;

/// Tag attached to every embedded reference number.
pub const SOURCE: &str = "measured(paper)";

/// Squeezing of the ancillas in the "squeezed" columns, in dB.
pub const ANCILLA_SQUEEZING_DB: f64 = -3.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    Vacuum,
    /// Phase-squeezed input (−3.5 dB / +8.9 dB).
    Squeezed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AncillaKind {
    Coherent,
    Squeezed,
}

impl InputKind {
    pub const ALL: [InputKind; 2] = [InputKind::Vacuum, InputKind::Squeezed];

    pub fn name(self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Squeezed => "squeezed",
        }
    }
}

impl AncillaKind {
    pub const ALL: [AncillaKind; 2] = [AncillaKind::Coherent, AncillaKind::Squeezed];

    pub fn name(self) -> &'static str {
        match self {
            Self::Coherent => "coherent",
            Self::Squeezed => "squeezed",
        }
    }
}

/// `base` with the ancillas and input of one table column.
pub fn table_config(base: &CodeConfig, input: InputKind, ancilla: AncillaKind) -> CodeConfig {
    let mut cfg = match ancilla {
        AncillaKind::Coherent => CodeConfig::coherent(),
        AncillaKind::Squeezed => CodeConfig::with_squeezing_db(ANCILLA_SQUEEZING_DB),
    };
    if input == InputKind::Squeezed {
        cfg = cfg.squeezed_input();
    }
    cfg.loss = base.loss;
    cfg.fourier_mode = base.fourier_mode;
    cfg
}

const fn input_index(i: InputKind) -> usize {
    match i {
        InputKind::Vacuum => 0,
        InputKind::Squeezed => 1,
    }
}

const fn ancilla_index(a: AncillaKind) -> usize {
    match a {
        AncillaKind::Coherent => 0,
        AncillaKind::Squeezed => 1,
    }
}

/// Fidelities by `[input][ancilla][channel − 1]`.
const FIDELITY: [[[f64; 5]; 2]; 2] = [
    [[0.99, 0.99, 0.60, 0.40, 0.39], [0.99, 0.99, 0.75, 0.56, 0.59]],
    [[0.99, 0.99, 0.68, 0.42, 0.44], [0.99, 0.99, 0.85, 0.60, 0.59]],
];

pub fn fidelity(input: InputKind, ancilla: AncillaKind, channel: u8) -> f64 {
    FIDELITY[input_index(input)][ancilla_index(ancilla)][channel as usize - 1]
}

/// A measured noise power with its error bar, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisePower {
    pub value: f64,
    pub error: f64,
}

const fn np(value: f64, error: f64) -> Option<NoisePower> {
    Some(NoisePower { value, error })
}

/// Output noise powers by `[input][ancilla][channel − 1][quadrature]`; the
/// squeezed-ancilla runs did not measure channels 1 and 2.
const NOISE: [[[[Option<NoisePower>; 2]; 5]; 2]; 2] = [
    [
        [
            [np(0.15, 0.30), np(0.13, 0.30)],
            [np(0.19, 0.29), np(0.18, 0.30)],
            [np(2.39, 0.28), np(4.80, 0.29)],
            [np(2.47, 0.34), np(9.13, 0.30)],
            [np(2.99, 0.31), np(9.01, 0.32)],
        ],
        [
            [None, None],
            [None, None],
            [np(1.37, 0.29), np(3.07, 0.31)],
            [np(1.49, 0.29), np(6.40, 0.28)],
            [np(1.14, 0.28), np(5.94, 0.30)],
        ],
    ],
    [
        [
            [np(8.22, 0.31), np(-2.78, 0.27)],
            [np(8.09, 0.31), np(-2.73, 0.29)],
            [np(9.85, 0.27), np(4.28, 0.28)],
            [np(9.96, 0.32), np(9.25, 0.27)],
            [np(9.51, 0.27), np(9.03, 0.32)],
        ],
        [
            [None, None],
            [None, None],
            [np(8.93, 0.27), np(1.46, 0.30)],
            [np(8.89, 0.29), np(6.04, 0.30)],
            [np(9.02, 0.30), np(6.10, 0.33)],
        ],
    ],
];

/// `quadrature` is 0 for x and 1 for p.
pub fn noise_power(input: InputKind, ancilla: AncillaKind, channel: u8, quadrature: usize) -> Option<NoisePower> {
    NOISE[input_index(input)][ancilla_index(ancilla)][channel as usize - 1][quadrature]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shapes() {
        let measured = InputKind::ALL
            .iter()
            .flat_map(|&i| AncillaKind::ALL.iter().map(move |&a| (i, a)))
            .flat_map(|(i, a)| (1..=5).flat_map(move |k| (0..2).map(move |q| noise_power(i, a, k, q))))
            .filter(Option::is_some)
            .count();
        assert_eq!(measured, 32);
        assert_eq!(fidelity(InputKind::Squeezed, AncillaKind::Squeezed, 3), 0.85);
        assert_eq!(noise_power(InputKind::Vacuum, AncillaKind::Coherent, 4, 1), np(9.13, 0.30));
    }
}
