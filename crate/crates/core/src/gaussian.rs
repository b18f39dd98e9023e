//! Gaussian states in the quadrature picture.
//!
//! Quadratures are interleaved `(x₁, p₁, …, x_n, p_n)` and variances use the
//! convention where the vacuum has `Var(x) = Var(p) = 1/4`.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};
use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vacuum (shot-noise) variance of a single quadrature.
pub const VACUUM_VARIANCE: f64 = 0.25;

const SYMMETRY_TOL: f64 = 1e-12;
const UNCERTAINTY_TOL: f64 = 1e-9;
const SYMPLECTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("covariance matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("covariance violates the uncertainty relation (min eigenvalue {0:.3e})")]
    Unphysical(f64),
    #[error("covariance is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("matrix is not symplectic (deviation {0:.3e})")]
    NotSymplectic(f64),
    #[error("squeezing parameter must be non-negative, got {0}")]
    NegativeSqueezing(f64),
    #[error("transmittance {0} outside [0, 1]")]
    TransmittanceOutOfRange(f64),
    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("beam splitter needs two distinct modes, got {0} twice")]
    SameMode(usize),
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("expected a single-mode state, found {0} modes")]
    NotSingleMode(usize),
}

/// The symplectic form on interleaved ordering: block-diagonal `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Reduced noise on x.
    AmplitudeSqueezed,
    /// Reduced noise on p.
    PhaseSqueezed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state, rejecting asymmetric or unphysical covariances.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, GaussianError> {
        let state = Self::new_unchecked(mean, cov)?;
        state.check_physical()?;
        Ok(state)
    }

    /// Builds a state checking only shapes and symmetry.
    pub fn new_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, GaussianError> {
        let dim = mean.len();
        if !dim.is_multiple_of(2) || cov.nrows() != dim || cov.ncols() != dim {
            return Err(GaussianError::DimensionMismatch { expected: dim, found: cov.nrows() });
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL * (1.0 + cov.amax()) {
            return Err(GaussianError::NotSymmetric(asym));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { mean, cov })
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * modes),
            cov: DMatrix::identity(2 * modes, 2 * modes) * VACUUM_VARIANCE,
        }
    }

    /// Single-mode squeezed vacuum with squeezing `r`. The anti-squeezed
    /// quadrature carries an extra factor `1 + antisqueeze_excess` so that
    /// impure (squeezed thermal) sources can be described.
    pub fn squeezed_vacuum(
        r: f64,
        orientation: Orientation,
        antisqueeze_excess: f64,
    ) -> Result<Self, GaussianError> {
        if r < 0.0 || !r.is_finite() {
            return Err(GaussianError::NegativeSqueezing(r));
        }
        if antisqueeze_excess < 0.0 {
            return Err(GaussianError::NonPositiveVariance(antisqueeze_excess));
        }
        let low = VACUUM_VARIANCE * (-2.0 * r).exp();
        let high = VACUUM_VARIANCE * (2.0 * r).exp() * (1.0 + antisqueeze_excess);
        Ok(Self::diagonal_single(orientation, low, high))
    }

    /// Squeezed state given by its measured squeezing / anti-squeezing
    /// levels in dB relative to shot noise, e.g. `(-3.5, 8.9)`.
    pub fn squeezed_from_db(
        squeeze_db: f64,
        antisqueeze_db: f64,
        orientation: Orientation,
    ) -> Result<Self, GaussianError> {
        let low = db_to_variance(squeeze_db);
        let high = db_to_variance(antisqueeze_db);
        let state = Self::diagonal_single(orientation, low, high);
        state.check_physical()?;
        Ok(state)
    }

    fn diagonal_single(orientation: Orientation, low: f64, high: f64) -> Self {
        let (vx, vp) = match orientation {
            Orientation::AmplitudeSqueezed => (low, high),
            Orientation::PhaseSqueezed => (high, low),
        };
        Self {
            mean: DVector::zeros(2),
            cov: DMatrix::from_diagonal(&DVector::from_vec(vec![vx, vp])),
        }
    }

    /// Tensor product of independent states.
    pub fn direct_sum(parts: &[GaussianState]) -> Self {
        let dim: usize = parts.iter().map(|s| s.dim()).sum();
        let mut mean = DVector::zeros(dim);
        let mut cov = DMatrix::zeros(dim, dim);
        let mut off = 0;
        for s in parts {
            let d = s.dim();
            mean.rows_mut(off, d).copy_from(&s.mean);
            cov.view_mut((off, off), (d, d)).copy_from(&s.cov);
            off += d;
        }
        Self { mean, cov }
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// `(Var x, Var p)` of one mode.
    pub fn quadrature_variances(&self, mode: usize) -> (f64, f64) {
        (self.cov[(2 * mode, 2 * mode)], self.cov[(2 * mode + 1, 2 * mode + 1)])
    }

    /// Reduced state on the listed modes, in the given order.
    pub fn marginal(&self, modes: &[usize]) -> Result<Self, GaussianError> {
        let n = self.modes();
        let mut idx = Vec::with_capacity(2 * modes.len());
        for &m in modes {
            if m >= n {
                return Err(GaussianError::ModeOutOfRange { index: m, modes: n });
            }
            idx.push(2 * m);
            idx.push(2 * m + 1);
        }
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Ok(Self { mean, cov })
    }

    /// `det(4·cov)`; equals 1 for pure states.
    pub fn purity_determinant(&self) -> f64 {
        (&self.cov * 4.0).determinant()
    }

    pub fn is_pure(&self) -> bool {
        (self.purity_determinant() - 1.0).abs() < 1e-6
    }

    /// Smallest eigenvalue of `cov + (i/4)Ω`; negative when the state
    /// violates the uncertainty relation.
    pub fn uncertainty_margin(&self) -> f64 {
        let n = self.modes();
        let omega = symplectic_form(n);
        let herm = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            Complex::new(self.cov[(i, j)], 0.25 * omega[(i, j)])
        });
        SymmetricEigen::new(herm).eigenvalues.min()
    }

    /// Checks `cov + (i/4)Ω ⪰ 0`.
    pub fn check_physical(&self) -> Result<(), GaussianError> {
        let min = self.uncertainty_margin();
        if min < -UNCERTAINTY_TOL {
            return Err(GaussianError::Unphysical(min));
        }
        Ok(())
    }

    pub fn displace(&self, d: &DVector<f64>) -> Result<Self, GaussianError> {
        if d.len() != self.dim() {
            return Err(GaussianError::DimensionMismatch { expected: self.dim(), found: d.len() });
        }
        Ok(Self { mean: &self.mean + d, cov: self.cov.clone() })
    }

    pub fn apply(&self, op: &SymplecticOp) -> Result<Self, GaussianError> {
        if op.dim() != self.dim() {
            return Err(GaussianError::DimensionMismatch { expected: self.dim(), found: op.dim() });
        }
        Ok(Self {
            mean: &op.matrix * &self.mean + &op.displacement,
            cov: &op.matrix * &self.cov * op.matrix.transpose(),
        })
    }

    /// Applies an arbitrary affine map `v → L·v + d`. The result may have a
    /// different mode count; physicality is re-checked.
    pub fn linear_map(&self, l: &DMatrix<f64>, d: &DVector<f64>) -> Result<Self, GaussianError> {
        if l.ncols() != self.dim() {
            return Err(GaussianError::DimensionMismatch { expected: self.dim(), found: l.ncols() });
        }
        if d.len() != l.nrows() {
            return Err(GaussianError::DimensionMismatch { expected: l.nrows(), found: d.len() });
        }
        let out = Self::new_unchecked(l * &self.mean + d, l * &self.cov * l.transpose())?;
        out.check_physical()?;
        Ok(out)
    }

    /// Pure-loss channel of transmissivity `eta` on one mode.
    pub fn loss_channel(&self, mode: usize, eta: f64) -> Result<Self, GaussianError> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(GaussianError::TransmittanceOutOfRange(eta));
        }
        let n = self.modes();
        if mode >= n {
            return Err(GaussianError::ModeOutOfRange { index: mode, modes: n });
        }
        let t = eta.sqrt();
        let mut x = DMatrix::identity(2 * n, 2 * n);
        x[(2 * mode, 2 * mode)] = t;
        x[(2 * mode + 1, 2 * mode + 1)] = t;
        let mut cov = &x * &self.cov * &x;
        cov[(2 * mode, 2 * mode)] += (1.0 - eta) * VACUUM_VARIANCE;
        cov[(2 * mode + 1, 2 * mode + 1)] += (1.0 - eta) * VACUUM_VARIANCE;
        Ok(Self { mean: &x * &self.mean, cov })
    }

    pub fn sampler(&self) -> Result<GaussianSampler, GaussianError> {
        GaussianSampler::new(self)
    }

    /// One draw from the state's Wigner distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DVector<f64>, GaussianError> {
        Ok(self.sampler()?.sample(rng))
    }
}

/// Multivariate normal sampler `mean + F·z` with `F·Fᵀ = cov`.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    mean: DVector<f64>,
    factor: DMatrix<f64>,
}

impl GaussianSampler {
    pub fn new(state: &GaussianState) -> Result<Self, GaussianError> {
        // eigen-factorisation tolerates the singular covariances that appear
        // after feedforward maps
        let eig = SymmetricEigen::new(state.cov.clone());
        let scale = state.cov.amax().max(1e-300);
        let min = eig.eigenvalues.min();
        if min < -1e-10 * scale {
            return Err(GaussianError::NotPositive(min));
        }
        let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let factor = &eig.eigenvectors * DMatrix::from_diagonal(&roots);
        Ok(Self { mean: state.mean.clone(), factor })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        &self.mean + &self.factor * z
    }
}

/// An affine symplectic map `v → S·v + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    matrix: DMatrix<f64>,
    displacement: DVector<f64>,
}

impl SymplecticOp {
    pub fn new(matrix: DMatrix<f64>, displacement: DVector<f64>) -> Result<Self, GaussianError> {
        let dim = matrix.nrows();
        if !dim.is_multiple_of(2) || matrix.ncols() != dim {
            return Err(GaussianError::DimensionMismatch { expected: dim, found: matrix.ncols() });
        }
        if displacement.len() != dim {
            return Err(GaussianError::DimensionMismatch { expected: dim, found: displacement.len() });
        }
        let omega = symplectic_form(dim / 2);
        let dev = (&matrix * &omega * matrix.transpose() - &omega).amax();
        if dev > SYMPLECTIC_TOL {
            return Err(GaussianError::NotSymplectic(dev));
        }
        Ok(Self { matrix, displacement })
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * modes, 2 * modes),
            displacement: DVector::zeros(2 * modes),
        }
    }

    pub fn displacement_op(d: DVector<f64>) -> Result<Self, GaussianError> {
        let n = d.len();
        Self::new(DMatrix::identity(n, n), d)
    }

    /// Lifts a real orthogonal mode matrix to act identically on the x and
    /// p blocks.
    pub fn from_orthogonal(mode_matrix: &DMatrix<f64>) -> Result<Self, GaussianError> {
        let n = mode_matrix.nrows();
        if mode_matrix.ncols() != n {
            return Err(GaussianError::DimensionMismatch { expected: n, found: mode_matrix.ncols() });
        }
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let v = mode_matrix[(i, j)];
                s[(2 * i, 2 * j)] = v;
                s[(2 * i + 1, 2 * j + 1)] = v;
            }
        }
        Self::new(s, DVector::zeros(2 * n))
    }

    /// 90° phase-space rotation `(x, p) → (−p, x)` on one mode.
    pub fn fourier(modes: usize, mode: usize) -> Result<Self, GaussianError> {
        if mode >= modes {
            return Err(GaussianError::ModeOutOfRange { index: mode, modes });
        }
        let mut s = DMatrix::identity(2 * modes, 2 * modes);
        s[(2 * mode, 2 * mode)] = 0.0;
        s[(2 * mode + 1, 2 * mode + 1)] = 0.0;
        s[(2 * mode, 2 * mode + 1)] = -1.0;
        s[(2 * mode + 1, 2 * mode)] = 1.0;
        Self::new(s, DVector::zeros(2 * modes))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    /// `self ∘ first`: applies `first`, then `self`.
    pub fn after(&self, first: &SymplecticOp) -> Result<Self, GaussianError> {
        if first.dim() != self.dim() {
            return Err(GaussianError::DimensionMismatch { expected: self.dim(), found: first.dim() });
        }
        Ok(Self {
            matrix: &self.matrix * &first.matrix,
            displacement: &self.matrix * &first.displacement + &self.displacement,
        })
    }
}

/// Two-mode beam splitter of transmittance `T` between modes `k` and `l`
/// (0-based) with mode matrix `[[√(1−T), √T], [±√T, ∓√(1−T)]]`.
pub fn beamsplitter_symplectic(
    modes: usize,
    k: usize,
    l: usize,
    transmittance: f64,
    plus: bool,
) -> Result<SymplecticOp, GaussianError> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(GaussianError::TransmittanceOutOfRange(transmittance));
    }
    for &m in &[k, l] {
        if m >= modes {
            return Err(GaussianError::ModeOutOfRange { index: m, modes });
        }
    }
    if k == l {
        return Err(GaussianError::SameMode(k));
    }
    let (t, r) = (transmittance.sqrt(), (1.0 - transmittance).sqrt());
    let s = if plus { 1.0 } else { -1.0 };
    let mut m = DMatrix::identity(modes, modes);
    m[(k, k)] = r;
    m[(k, l)] = t;
    m[(l, k)] = s * t;
    m[(l, l)] = -s * r;
    SymplecticOp::from_orthogonal(&m)
}

/// Uhlmann fidelity of two single-mode Gaussian states.
///
/// Covariances are rescaled by 4 (vacuum = identity) and mean differences
/// by √2 before applying the closed form
/// `F = 2 / (√(Δ+δ) − √δ) · exp(−βᵀ(σ₁+σ₂)⁻¹β)` with `Δ = det(σ₁+σ₂)` and
/// `δ = (det σ₁ − 1)(det σ₂ − 1)`.
pub fn fidelity_gaussian(rho1: &GaussianState, rho2: &GaussianState) -> Result<f64, GaussianError> {
    for s in [rho1, rho2] {
        if s.modes() != 1 {
            return Err(GaussianError::NotSingleMode(s.modes()));
        }
        s.check_physical()?;
    }
    let to_unit = |s: &GaussianState| {
        Matrix2::new(s.cov[(0, 0)], s.cov[(0, 1)], s.cov[(1, 0)], s.cov[(1, 1)]) * 4.0
    };
    let s1 = to_unit(rho1);
    let s2 = to_unit(rho2);
    let sum = s1 + s2;
    let big_delta = sum.determinant();
    // clamp tiny negatives from rounding on pure states
    let small_delta = ((s1.determinant() - 1.0) * (s2.determinant() - 1.0)).max(0.0);
    let beta = Vector2::new(rho2.mean[0] - rho1.mean[0], rho2.mean[1] - rho1.mean[1])
        * std::f64::consts::SQRT_2;
    let inv = sum.try_inverse().ok_or(GaussianError::Unphysical(big_delta))?;
    let exponent = (beta.transpose() * inv * beta)[(0, 0)];
    let f = 2.0 / ((big_delta + small_delta).sqrt() - small_delta.sqrt()) * (-exponent).exp();
    Ok(f.clamp(0.0, 1.0))
}

/// Noise power relative to shot noise: `10·log10(v / (1/4))`.
pub fn variance_to_db(v: f64) -> Result<f64, GaussianError> {
    if v.is_nan() || v <= 0.0 {
        return Err(GaussianError::NonPositiveVariance(v));
    }
    Ok(10.0 * (v / VACUUM_VARIANCE).log10())
}

pub fn db_to_variance(db: f64) -> f64 {
    VACUUM_VARIANCE * 10f64.powf(db / 10.0)
}

/// Squeezing parameter `r` for a squeezed-quadrature level in dB
/// (negative below shot noise): `e^{-2r} = 10^{dB/10}`.
pub fn squeezing_from_db(db: f64) -> f64 {
    -db / 10.0 * std::f64::consts::LN_10 / 2.0
}
