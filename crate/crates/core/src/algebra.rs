//! Exact linear forms over quadrature symbols.
//!
//! A [`LinearForm`] is a Heisenberg-picture quadrature written as an exact
//! combination of independent symbols: the input mode, the four ancillas
//! and the five channel errors. Ancilla symbols come in two flavours: the
//! bare mode quadrature (`x_a2`), used when stating mode-level identities,
//! and the physical vacuum quadrature with its squeezing factor
//! (`x₂⁽⁰⁾e^{-r}`), which is what variances are computed from.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::ExactScalar;
use crate::gaussian::VACUUM_VARIANCE;
use crate::network::ModeMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("expected {expected} forms, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("symbol {0} has no defined variance")]
    UnknownVariance(QuadSymbol),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    pub fn other(self) -> Self {
        match self {
            Self::X => Self::P,
            Self::P => Self::X,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Self::X => 0,
            Self::P => 1,
        }
    }
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::X => "x",
            Self::P => "p",
        })
    }
}

/// Which physical mode a symbol belongs to. Ancillas and errors are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeLabel {
    Ancilla(u8),
    Input,
    Error(u8),
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ancilla(m) => write!(f, "a{m}"),
            Self::Input => write!(f, "a_in"),
            Self::Error(k) => write!(f, "e{k}"),
        }
    }
}

/// Squeezing factor attached to a vacuum quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attenuation {
    /// Bare mode quadrature; no variance is implied.
    None,
    /// `e^{-r}`
    Squeezed,
    /// `e^{+r}`
    Antisqueezed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadSymbol {
    pub mode: ModeLabel,
    pub quadrature: Quadrature,
    pub attenuation: Attenuation,
}

impl QuadSymbol {
    pub fn input(q: Quadrature) -> Self {
        Self { mode: ModeLabel::Input, quadrature: q, attenuation: Attenuation::None }
    }

    /// The bare quadrature of ancilla `m` (1..=4).
    pub fn ancilla(m: u8, q: Quadrature) -> Self {
        Self { mode: ModeLabel::Ancilla(m), quadrature: q, attenuation: Attenuation::None }
    }

    /// Vacuum quadrature of ancilla `m` scaled by `e^{∓r}`.
    pub fn ancilla_vacuum(m: u8, q: Quadrature, attenuation: Attenuation) -> Self {
        Self { mode: ModeLabel::Ancilla(m), quadrature: q, attenuation }
    }

    /// Error displacement on channel `k` (1..=5).
    pub fn error(k: u8, q: Quadrature) -> Self {
        Self { mode: ModeLabel::Error(k), quadrature: q, attenuation: Attenuation::None }
    }

    pub fn is_error(&self) -> bool {
        matches!(self.mode, ModeLabel::Error(_))
    }
}

impl fmt::Display for QuadSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.quadrature;
        match (self.mode, self.attenuation) {
            (ModeLabel::Ancilla(m), Attenuation::Squeezed) => write!(f, "{q}{m}⁰·e^-r"),
            (ModeLabel::Ancilla(m), Attenuation::Antisqueezed) => write!(f, "{q}{m}⁰·e^+r"),
            // `{:#}` drops the quadrature prefix for mode-level notation
            (mode, _) if f.alternate() => write!(f, "{mode}"),
            (ModeLabel::Input, _) => write!(f, "{q}_in"),
            (mode, _) => write!(f, "{q}_{mode}"),
        }
    }
}

/// Exact linear combination of quadrature symbols. Zero coefficients are
/// never stored, so structural equality is exact equality.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearForm {
    terms: BTreeMap<QuadSymbol, ExactScalar>,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn symbol(s: QuadSymbol) -> Self {
        Self::term(s, ExactScalar::ONE)
    }

    pub fn term(s: QuadSymbol, coeff: ExactScalar) -> Self {
        let mut out = Self::zero();
        out.add_term(s, coeff);
        out
    }

    pub fn add_term(&mut self, s: QuadSymbol, coeff: ExactScalar) {
        let slot = self.terms.entry(s).or_insert(ExactScalar::ZERO);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&s);
        }
    }

    /// Coefficient of `s` (zero when absent).
    pub fn coeff(&self, s: &QuadSymbol) -> ExactScalar {
        self.terms.get(s).copied().unwrap_or(ExactScalar::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QuadSymbol, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: ExactScalar) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            out.add_term(*s, *c * k);
        }
        out
    }

    /// Keeps only the terms whose symbol satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&QuadSymbol) -> bool) -> Self {
        Self { terms: self.terms.iter().filter(|(s, _)| keep(s)).map(|(s, c)| (*s, *c)).collect() }
    }

    pub fn error_part(&self) -> Self {
        self.filter(QuadSymbol::is_error)
    }

    pub fn without_errors(&self) -> Self {
        self.filter(|s| !s.is_error())
    }

    /// Replaces every symbol for which `rule` returns a form.
    pub fn substitute(&self, rule: impl Fn(&QuadSymbol) -> Option<LinearForm>) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            match rule(s) {
                Some(f) => out = out + f.scale(*c),
                None => out.add_term(*s, *c),
            }
        }
        out
    }

    /// Float value of the form for given symbol values.
    pub fn evaluate(&self, value: impl Fn(&QuadSymbol) -> f64) -> f64 {
        self.terms.iter().map(|(s, c)| c.to_f64() * value(s)).sum()
    }
}

impl Add for LinearForm {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (s, c) in rhs.terms {
            self.add_term(s, c);
        }
        self
    }
}

impl Sub for LinearForm {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for LinearForm {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ExactScalar::ONE)
    }
}

impl Mul<ExactScalar> for LinearForm {
    type Output = Self;
    fn mul(self, k: ExactScalar) -> Self {
        self.scale(k)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            let neg = c.signum() < 0;
            let mag = if neg { -*c } else { *c };
            match (i, neg) {
                (0, true) => write!(f, "−")?,
                (0, false) => {}
                (_, true) => write!(f, " − ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag != ExactScalar::ONE {
                write!(f, "{mag}·")?;
            }
            if f.alternate() {
                write!(f, "{s:#}")?;
            } else {
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

/// Row `i` of the output is `Σ_j m[i][j]·forms[j]`.
pub fn form_apply_matrix(forms: &[LinearForm], m: &ModeMatrix) -> Result<Vec<LinearForm>, AlgebraError> {
    if forms.len() != m.size() {
        return Err(AlgebraError::DimensionMismatch { expected: m.size(), found: forms.len() });
    }
    Ok((0..m.size())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(forms)
                .filter(|(c, _)| !c.is_zero())
                .fold(LinearForm::zero(), |acc, (c, f)| acc + f.scale(*c))
        })
        .collect())
}

/// Variances of the independent symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceModel {
    /// Squeezing parameter of each ancilla.
    pub ancilla_r: [f64; 4],
    /// `(Var x_in, Var p_in)`.
    pub input: (f64, f64),
}

impl VarianceModel {
    pub fn uniform(r: f64, input: (f64, f64)) -> Self {
        Self { ancilla_r: [r; 4], input }
    }

    pub fn variance(&self, s: &QuadSymbol) -> Result<f64, AlgebraError> {
        match (s.mode, s.attenuation) {
            (ModeLabel::Input, _) => Ok(match s.quadrature {
                Quadrature::X => self.input.0,
                Quadrature::P => self.input.1,
            }),
            (ModeLabel::Ancilla(m), Attenuation::Squeezed) if (1..=4).contains(&m) => {
                Ok(VACUUM_VARIANCE * (-2.0 * self.ancilla_r[m as usize - 1]).exp())
            }
            (ModeLabel::Ancilla(m), Attenuation::Antisqueezed) if (1..=4).contains(&m) => {
                Ok(VACUUM_VARIANCE * (2.0 * self.ancilla_r[m as usize - 1]).exp())
            }
            _ => Err(AlgebraError::UnknownVariance(*s)),
        }
    }
}

/// `Cov(f, g) = Σ_s f_s·g_s·Var(s)` for independent zero-mean symbols.
pub fn form_covariance(f: &LinearForm, g: &LinearForm, model: &VarianceModel) -> Result<f64, AlgebraError> {
    let mut acc = 0.0;
    for (s, c) in f.terms() {
        let var = model.variance(s)?;
        let d = g.coeff(s);
        if !d.is_zero() {
            acc += (*c * d).to_f64() * var;
        }
    }
    // symbols present only in g still need a defined variance
    for (s, _) in g.terms() {
        model.variance(s)?;
    }
    Ok(acc)
}

pub fn form_variance(f: &LinearForm, model: &VarianceModel) -> Result<f64, AlgebraError> {
    form_covariance(f, f, model)
}
