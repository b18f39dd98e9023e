//! Variance-based full-inseparability witness on the five encoded modes.
//!
//! Each of the four combinations is a sum of two quadrature variances; a
//! separable state cannot push any of them below one vacuum unit (`4 × 1/4`).

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{form_covariance, form_variance, AlgebraError, LinearForm, Quadrature};
use crate::qec::{CodeConfig, InputSpec, QecError, SymbolicCode};

/// Separability bound on every combination.
pub const WITNESS_BOUND: f64 = 1.0;

/// Values must fall this far below the bound to count as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("the witness is defined for a vacuum input")]
    NonVacuumInput,
    #[error("combination index {0} outside 1..=4")]
    Combination(usize),
    #[error(transparent)]
    Qec(#[from] QecError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `a + g·b`; `gain` indexes the free gain (0-based `g1..g6`), if any.
struct Term {
    a: LinearForm,
    b: LinearForm,
    gain: Option<usize>,
}

fn quads(cfg: &CodeConfig) -> (Vec<LinearForm>, Vec<LinearForm>) {
    let code = SymbolicCode::new();
    let b = cfg.basis();
    (code.encoded_physical(Quadrature::X, b), code.encoded_physical(Quadrature::P, b))
}

fn combination(idx: usize, x: &[LinearForm], p: &[LinearForm]) -> Result<[Term; 2], WitnessError> {
    let c = |i: usize| x[i - 1].clone();
    let q = |i: usize| p[i - 1].clone();
    let none = LinearForm::zero;
    let t = |a, b, gain| Term { a, b, gain };
    Ok(match idx {
        1 => [t(c(1) + c(2), none(), None), t(q(2) - q(1), -q(3), Some(2))],
        2 => [t(q(2) - q(3), -q(1), Some(0)), t(c(3) + c(2), c(4), Some(3))],
        3 => [t(c(3) + c(4), c(2), Some(1)), t(q(4) - q(3), -q(5), Some(4))],
        4 => [t(q(4) - q(5), -q(3), Some(5)), t(c(4) + c(5), none(), None)],
        other => return Err(WitnessError::Combination(other)),
    })
}

fn check_input(cfg: &CodeConfig) -> Result<(), WitnessError> {
    if cfg.input != InputSpec::Vacuum {
        return Err(WitnessError::NonVacuumInput);
    }
    cfg.validate()?;
    Ok(())
}

/// Value of combination `idx` (1..=4) at the given gains `g1..g6`.
pub fn combination_value(idx: usize, gains: &[f64; 6], cfg: &CodeConfig) -> Result<f64, WitnessError> {
    check_input(cfg)?;
    let (x, p) = quads(cfg);
    let model = cfg.variance_model()?;
    let mut total = 0.0;
    for term in combination(idx, &x, &p)? {
        let g = term.gain.map_or(0.0, |i| gains[i]);
        let va = form_variance(&term.a, &model)?;
        let vb = form_variance(&term.b, &model)?;
        let cab = form_covariance(&term.a, &term.b, &model)?;
        total += va + 2.0 * g * cab + g * g * vb;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessResult {
    /// Combinations 1..=4.
    pub values: [f64; 4],
    pub gains: [f64; 6],
    pub bound: f64,
    pub satisfied: [bool; 4],
    pub notes: Vec<String>,
}

impl WitnessResult {
    pub fn fully_inseparable(&self) -> bool {
        self.satisfied.iter().all(|&s| s)
    }
}

/// Minimises each combination over its gains; every gain enters one
/// quadratic term, so the vertex `g = −Cov(a, b)/Var(b)` is exact.
pub fn optimize_gains(cfg: &CodeConfig) -> Result<WitnessResult, WitnessError> {
    check_input(cfg)?;
    let (x, p) = quads(cfg);
    let model = cfg.variance_model()?;
    let mut gains = [0.0; 6];
    let mut notes = Vec::new();
    for idx in 1..=4 {
        for term in combination(idx, &x, &p)? {
            if let Some(i) = term.gain {
                let vb = form_variance(&term.b, &model)?;
                if vb > 0.0 {
                    gains[i] = -form_covariance(&term.a, &term.b, &model)? / vb;
                } else {
                    notes.push(format!("g{} has a flat quadratic; set to 0", i + 1));
                }
            }
        }
    }
    let mut values = [0.0; 4];
    for (k, v) in values.iter_mut().enumerate() {
        *v = combination_value(k + 1, &gains, cfg)?;
    }
    let satisfied = values.map(|v| v < WITNESS_BOUND - VIOLATION_MARGIN);
    notes.extend(
        values
            .iter()
            .enumerate()
            .filter(|(i, _)| !satisfied[*i])
            .map(|(i, v)| format!("combination {} = {v:.6} does not beat the bound", i + 1)),
    );
    Ok(WitnessResult { values, gains, bound: WITNESS_BOUND, satisfied, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_ancillas_sit_on_the_bound() {
        let res = optimize_gains(&CodeConfig::coherent()).unwrap();
        for v in res.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(!res.fully_inseparable());
        assert_eq!(res.notes.len(), 4);
    }

    #[test]
    fn squeezed_ancillas_violate_every_combination() {
        let res = optimize_gains(&CodeConfig::with_squeezing_db(-3.5)).unwrap();
        assert!(res.fully_inseparable(), "{res:?}");
        assert!(res.notes.is_empty());
    }

    #[test]
    fn large_squeezing_limits() {
        let res = optimize_gains(&CodeConfig::with_r(12.0)).unwrap();
        let limits = [1.0 / 12.0, 1.0 / 12.0, 0.75, 0.75];
        for (v, l) in res.values.iter().zip(limits) {
            assert!((v - l).abs() < 1e-6, "{v} vs {l}");
        }
        for g in res.gains {
            assert!((g - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn squeezed_input_is_rejected() {
        let cfg = CodeConfig::with_r(0.4).squeezed_input();
        assert_eq!(optimize_gains(&cfg), Err(WitnessError::NonVacuumInput));
        assert!(matches!(combination_value(7, &[1.0; 6], &CodeConfig::coherent()), Err(WitnessError::Combination(7))));
    }
}
