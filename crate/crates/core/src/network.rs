//! The five-mode beam-splitter encoder: exact mode matrices, composition of
//! two-mode elements, inversion, and the lift to phase space.

use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, ExactScalar, Rational};
use crate::gaussian::{GaussianError, SymplecticOp};

/// Number of carriers in the code.
pub const MODES: usize = 5;

/// Position of the input mode in the encoder's input ordering
/// `(a₁, a₂, a₃, a_in, a₄)`.
pub const INPUT_SLOT: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("mode index {0} outside 1..={MODES}")]
    ModeOutOfRange(usize),
    #[error("element couples mode {0} to itself")]
    SameMode(usize),
    #[error("transmittance {0} outside [0, 1]")]
    TransmittanceOutOfRange(f64),
    #[error("√T or √(1−T) for T = {0} is not exactly representable")]
    NotRepresentable(f64),
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("fourier flags must cover all {MODES} modes, got {0}")]
    FourierFlags(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

/// Square matrix over ℚ(√2, √3).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeMatrix {
    n: usize,
    entries: Vec<ExactScalar>,
}

impl ModeMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![ExactScalar::ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = ExactScalar::ONE;
        }
        Self { n, entries }
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Result<Self, NetworkError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(NetworkError::DimensionMismatch(n, row.len()));
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> ExactScalar {
        self.entries[row * self.n + col]
    }

    fn set(&mut self, row: usize, col: usize, v: ExactScalar) {
        self.entries[row * self.n + col] = v;
    }

    pub fn row(&self, row: usize) -> &[ExactScalar] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(j, i));
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, NetworkError> {
        if self.n != rhs.n {
            return Err(NetworkError::DimensionMismatch(self.n, rhs.n));
        }
        let n = self.n;
        let mut out = Self::identity(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ExactScalar::ZERO;
                for k in 0..n {
                    let (a, b) = (self.get(i, k), rhs.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&a.checked_mul(&b)?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `M·Mᵀ = I` with exact equality.
    pub fn is_orthogonal(&self) -> bool {
        self.mul(&self.transpose()).map(|p| p == Self::identity(self.n)).unwrap_or(false)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64())
    }
}

impl std::fmt::Display for ModeMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The encoder mode matrix acting on `(a₁, a₂, a₃, a_in, a₄)`.
pub fn encoder_matrix() -> ModeMatrix {
    let s = |n: i64, d: i64| ExactScalar::rational(n, d);
    let r2 = ExactScalar::sqrt2();
    let r3 = ExactScalar::sqrt3();
    let r6 = ExactScalar::sqrt6();
    let z = ExactScalar::ZERO;
    // 1/√2 = √2/2, √3/(2√2) = √6/4, 1/(2√2) = √2/4, 1/√6 = √6/6,
    // 1/√3 = √3/3, 1/(2√6) = √6/12
    let rows = vec![
        vec![r2 * s(1, 2), r6 * s(1, 4), r2 * s(1, 4), z, z],
        vec![r2 * s(1, 2), r6 * s(-1, 4), r2 * s(-1, 4), z, z],
        vec![z, r6 * s(1, 6), r2 * s(-1, 2), r3 * s(1, 3), z],
        vec![z, r6 * s(1, 12), r2 * s(-1, 4), r3 * s(-1, 3), r2 * s(1, 2)],
        vec![z, r6 * s(-1, 12), r2 * s(1, 4), r3 * s(1, 3), r2 * s(1, 2)],
    ];
    ModeMatrix::from_rows(rows).expect("square")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// One element of a network; mode indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkElement {
    BeamSplitter {
        k: usize,
        l: usize,
        #[serde(rename = "T")]
        transmittance: f64,
        sign: Sign,
    },
    /// Exchanges two input ports.
    Swap { swap: [usize; 2] },
}

impl NetworkElement {
    pub fn beam_splitter(k: usize, l: usize, transmittance: f64, sign: Sign) -> Self {
        Self::BeamSplitter { k, l, transmittance, sign }
    }

    fn modes(&self) -> (usize, usize) {
        match *self {
            Self::BeamSplitter { k, l, .. } => (k, l),
            Self::Swap { swap: [k, l] } => (k, l),
        }
    }

    fn validate(&self) -> Result<(), NetworkError> {
        let (k, l) = self.modes();
        for m in [k, l] {
            if !(1..=MODES).contains(&m) {
                return Err(NetworkError::ModeOutOfRange(m));
            }
        }
        if k == l {
            return Err(NetworkError::SameMode(k));
        }
        if let Self::BeamSplitter { transmittance, .. } = *self {
            if !(0.0..=1.0).contains(&transmittance) {
                return Err(NetworkError::TransmittanceOutOfRange(transmittance));
            }
        }
        Ok(())
    }

    /// The element's 2×2 block `[[m_kk, m_kl], [m_lk, m_ll]]` in exact form.
    fn exact_block(&self) -> Result<[ExactScalar; 4], NetworkError> {
        match *self {
            Self::Swap { .. } => Ok([ExactScalar::ZERO, ExactScalar::ONE, ExactScalar::ONE, ExactScalar::ZERO]),
            Self::BeamSplitter { transmittance, sign, .. } => {
                let t = rational_approx(transmittance).ok_or(NetworkError::NotRepresentable(transmittance))?;
                let root_t =
                    ExactScalar::sqrt_rational(t).ok_or(NetworkError::NotRepresentable(transmittance))?;
                let root_r = ExactScalar::sqrt_rational(Rational::from_integer(1) - t)
                    .ok_or(NetworkError::NotRepresentable(transmittance))?;
                let s = match sign {
                    Sign::Plus => ExactScalar::ONE,
                    Sign::Minus => -ExactScalar::ONE,
                };
                Ok([root_r, root_t, s * root_t, -(s * root_r)])
            }
        }
    }

    fn float_block(&self) -> [f64; 4] {
        match *self {
            Self::Swap { .. } => [0.0, 1.0, 1.0, 0.0],
            Self::BeamSplitter { transmittance, sign, .. } => {
                let (t, r) = (transmittance.sqrt(), (1.0 - transmittance).sqrt());
                let s = if sign == Sign::Plus { 1.0 } else { -1.0 };
                [r, t, s * t, -s * r]
            }
        }
    }
}

/// Best rational with denominator ≤ 1000 within 1e-12 of `x`
/// (continued-fraction convergents).
fn rational_approx(x: f64) -> Option<Rational> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        let ai = a as i64;
        let (h2, k2) = (ai.checked_mul(h1)?.checked_add(h0)?, ai.checked_mul(k1)?.checked_add(k0)?);
        if k2 > 1000 {
            return None;
        }
        if (h2 as f64 / k2 as f64 - x).abs() < 1e-12 {
            return Some(Ratio::new(h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-15 {
            return None;
        }
        v = 1.0 / frac;
    }
    None
}

/// Ordered beam-splitter elements, listed in the order light meets them,
/// plus optional 90° rotations on input ports.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub elements: Vec<NetworkElement>,
    #[serde(default)]
    pub fourier: Vec<bool>,
}

impl NetworkSpec {
    /// `U = B₄₅⁻(1/2)·B₃₄⁺(1/3)·B₁₂⁺(1/2)·B₂₃⁺(1/4)`, rightmost acting first.
    pub fn five_mode_encoder() -> Self {
        use NetworkElement as E;
        Self {
            elements: vec![
                E::beam_splitter(2, 3, 0.25, Sign::Plus),
                E::beam_splitter(1, 2, 0.5, Sign::Plus),
                E::beam_splitter(3, 4, 1.0 / 3.0, Sign::Plus),
                E::beam_splitter(4, 5, 0.5, Sign::Minus),
            ],
            fourier: vec![false; MODES],
        }
    }

    pub fn with_fourier(mut self, flags: [bool; MODES]) -> Self {
        self.fourier = flags.to_vec();
        self
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        for e in &self.elements {
            e.validate()?;
        }
        if !self.fourier.is_empty() && self.fourier.len() != MODES {
            return Err(NetworkError::FourierFlags(self.fourier.len()));
        }
        Ok(())
    }

    pub fn fourier_flags(&self) -> [bool; MODES] {
        let mut flags = [false; MODES];
        for (f, &v) in flags.iter_mut().zip(&self.fourier) {
            *f = v;
        }
        flags
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("network spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Exact product of the network's elements, first element applied first.
pub fn compose(spec: &NetworkSpec) -> Result<ModeMatrix, NetworkError> {
    spec.validate()?;
    let mut m = ModeMatrix::identity(MODES);
    for e in &spec.elements {
        let (k, l) = e.modes();
        let (k, l) = (k - 1, l - 1);
        let [bkk, bkl, blk, bll] = e.exact_block()?;
        // only rows k and l change when a two-mode block is applied on the left
        let mut next = m.clone();
        for j in 0..MODES {
            let (mk, ml) = (m.get(k, j), m.get(l, j));
            next.set(k, j, bkk.checked_mul(&mk)?.checked_add(&bkl.checked_mul(&ml)?)?);
            next.set(l, j, blk.checked_mul(&mk)?.checked_add(&bll.checked_mul(&ml)?)?);
        }
        m = next;
    }
    Ok(m)
}

/// Float composition; accepts any transmittance.
pub fn compose_f64(spec: &NetworkSpec) -> Result<DMatrix<f64>, NetworkError> {
    spec.validate()?;
    let mut m = DMatrix::identity(MODES, MODES);
    for e in &spec.elements {
        let (k, l) = e.modes();
        let mut block = DMatrix::identity(MODES, MODES);
        let [a, b, c, d] = e.float_block();
        block[(k - 1, k - 1)] = a;
        block[(k - 1, l - 1)] = b;
        block[(l - 1, k - 1)] = c;
        block[(l - 1, l - 1)] = d;
        m = block * m;
    }
    Ok(m)
}

/// Inverse of an orthogonal mode matrix, i.e. its transpose.
pub fn inverse(m: &ModeMatrix) -> Result<ModeMatrix, NetworkError> {
    if !m.is_orthogonal() {
        return Err(NetworkError::NotOrthogonal);
    }
    Ok(m.transpose())
}

/// Phase-space lift of `m`, preceded by `(x, p) → (−p, x)` on every flagged
/// input port.
pub fn lift_to_symplectic(m: &ModeMatrix, fourier: &[bool; MODES]) -> Result<SymplecticOp, NetworkError> {
    if m.size() != MODES {
        return Err(NetworkError::DimensionMismatch(MODES, m.size()));
    }
    let mut op = SymplecticOp::from_orthogonal(&m.to_f64())?;
    for (mode, _) in fourier.iter().enumerate().filter(|(_, &f)| f) {
        op = op.after(&SymplecticOp::fourier(MODES, mode)?)?;
    }
    Ok(op)
}
