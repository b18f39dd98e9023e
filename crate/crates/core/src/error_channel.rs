//! Stochastic displacement errors and the mixed output they produce.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::{GaussianError, GaussianState};
use crate::qec::{
    classify, closed_form_syndrome, correction_plan, Basis, Channel, Classification, CodeConfig, CodePipeline,
    ErrorMoments, QecError, SymbolicCode,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErrorChannelError {
    #[error("error probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("amplitude {0} must be finite and non-negative")]
    Amplitude(f64),
    #[error("phase discretisation needs at least one bin")]
    PhaseBins,
    #[error("mixture weights must be non-negative and sum to 1, got {0}")]
    Weights(f64),
    #[error("mixture is empty")]
    EmptyMixture,
    #[error("mixture components disagree in mode count")]
    ModeCount,
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Qec(#[from] QecError),
}

/// How the size of a one-quadrature displacement is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Spread {
    /// `±A` with equal probability.
    #[default]
    Sign,
    /// `N(0, A²)`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DisplacementLaw {
    /// Amplitude `A` at a uniformly random phase.
    General,
    XOnly {
        #[serde(default)]
        spread: Spread,
    },
    POnly {
        #[serde(default)]
        spread: Spread,
    },
}

/// One component of a displacement law: a fixed shift plus optional
/// Gaussian spread, with a probability weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub mean: [f64; 2],
    pub spread: [f64; 2],
}

impl DisplacementLaw {
    pub fn sample<R: Rng + ?Sized>(&self, amplitude: f64, rng: &mut R) -> [f64; 2] {
        let one = |spread: Spread, rng: &mut R| match spread {
            Spread::Sign => {
                if rng.random::<bool>() {
                    amplitude
                } else {
                    -amplitude
                }
            }
            Spread::Gaussian => amplitude * rng.sample::<f64, _>(StandardNormal),
        };
        match *self {
            Self::General => {
                let phi = rng.random::<f64>() * std::f64::consts::TAU;
                [amplitude * phi.cos(), amplitude * phi.sin()]
            }
            Self::XOnly { spread } => [one(spread, rng), 0.0],
            Self::POnly { spread } => [0.0, one(spread, rng)],
        }
    }

    /// Zero mean and the second moments of the displacement.
    pub fn moments(&self, amplitude: f64) -> ErrorMoments {
        let a2 = amplitude * amplitude;
        let cov = match self {
            Self::General => [[a2 / 2.0, 0.0], [0.0, a2 / 2.0]],
            Self::XOnly { .. } => [[a2, 0.0], [0.0, 0.0]],
            Self::POnly { .. } => [[0.0, 0.0], [0.0, a2]],
        };
        ErrorMoments { mean: [0.0; 2], cov }
    }

    /// Finite decomposition; the general law uses `phase_bins` phases at bin
    /// centres.
    pub fn branches(&self, amplitude: f64, phase_bins: usize) -> Vec<Branch> {
        let a = amplitude;
        let signs = |unit: [f64; 2]| {
            vec![
                Branch { weight: 0.5, mean: [a * unit[0], a * unit[1]], spread: [0.0; 2] },
                Branch { weight: 0.5, mean: [-a * unit[0], -a * unit[1]], spread: [0.0; 2] },
            ]
        };
        let gauss = |unit: [f64; 2]| {
            vec![Branch { weight: 1.0, mean: [0.0; 2], spread: [a * a * unit[0], a * a * unit[1]] }]
        };
        match *self {
            Self::General => (0..phase_bins)
                .map(|k| {
                    let phi = std::f64::consts::TAU * (k as f64 + 0.5) / phase_bins as f64;
                    Branch { weight: 1.0 / phase_bins as f64, mean: [a * phi.cos(), a * phi.sin()], spread: [0.0; 2] }
                })
                .collect(),
            Self::XOnly { spread: Spread::Sign } => signs([1.0, 0.0]),
            Self::POnly { spread: Spread::Sign } => signs([0.0, 1.0]),
            Self::XOnly { spread: Spread::Gaussian } => gauss([1.0, 0.0]),
            Self::POnly { spread: Spread::Gaussian } => gauss([0.0, 1.0]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelPolicy {
    Fixed(Channel),
    Uniform,
}

fn default_bins() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorConfig {
    /// Probability that a round suffers an error.
    pub gamma: f64,
    pub channel: ChannelPolicy,
    pub law: DisplacementLaw,
    pub amplitude: f64,
    #[serde(default = "default_bins")]
    pub phase_bins: usize,
}

impl ErrorConfig {
    pub fn new(gamma: f64, channel: ChannelPolicy, law: DisplacementLaw, amplitude: f64) -> Self {
        Self { gamma, channel, law, amplitude, phase_bins: default_bins() }
    }

    /// An error that always strikes `channel`.
    pub fn certain(channel: Channel, law: DisplacementLaw, amplitude: f64) -> Self {
        Self::new(1.0, ChannelPolicy::Fixed(channel), law, amplitude)
    }

    pub fn validate(&self) -> Result<(), ErrorChannelError> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(ErrorChannelError::Probability(self.gamma));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(ErrorChannelError::Amplitude(self.amplitude));
        }
        if self.phase_bins == 0 {
            return Err(ErrorChannelError::PhaseBins);
        }
        Ok(())
    }

    /// Channels that can be hit, with their conditional probabilities.
    pub fn channel_weights(&self) -> Vec<(Channel, f64)> {
        match self.channel {
            ChannelPolicy::Fixed(c) => vec![(c, 1.0)],
            ChannelPolicy::Uniform => Channel::ALL.iter().map(|&c| (c, 0.2)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEvent {
    pub occurred: bool,
    pub channel: Option<Channel>,
    pub dx: f64,
    pub dp: f64,
}

impl ErrorEvent {
    pub fn none() -> Self {
        Self { occurred: false, channel: None, dx: 0.0, dp: 0.0 }
    }

    pub fn on(channel: Channel, dx: f64, dp: f64) -> Self {
        Self { occurred: true, channel: Some(channel), dx, dp }
    }
}

pub fn sample_error<R: Rng + ?Sized>(cfg: &ErrorConfig, rng: &mut R) -> Result<ErrorEvent, ErrorChannelError> {
    cfg.validate()?;
    if rng.random::<f64>() >= cfg.gamma {
        return Ok(ErrorEvent::none());
    }
    let channel = match cfg.channel {
        ChannelPolicy::Fixed(c) => c,
        ChannelPolicy::Uniform => Channel::ALL[rng.random_range(0..5)],
    };
    let [dx, dp] = cfg.law.sample(cfg.amplitude, rng);
    Ok(ErrorEvent::on(channel, dx, dp))
}

/// Weighted sum of single-mode Gaussian states.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    components: Vec<(f64, GaussianState)>,
}

impl MixtureState {
    pub fn new(components: Vec<(f64, GaussianState)>) -> Result<Self, ErrorChannelError> {
        let first = components.first().ok_or(ErrorChannelError::EmptyMixture)?;
        let modes = first.1.modes();
        if components.iter().any(|(_, s)| s.modes() != modes) {
            return Err(ErrorChannelError::ModeCount);
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if components.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(ErrorChannelError::Weights(total));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, GaussianState)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Merges components whose moments agree within `tol` and drops zero
    /// weights.
    pub fn simplify(&self, tol: f64) -> Self {
        let mut out: Vec<(f64, GaussianState)> = Vec::new();
        for (w, s) in &self.components {
            if *w == 0.0 {
                continue;
            }
            let same = |o: &GaussianState| (o.mean() - s.mean()).amax() <= tol && (o.cov() - s.cov()).amax() <= tol;
            match out.iter_mut().find(|(_, o)| same(o)) {
                Some(slot) => slot.0 += w,
                None => out.push((*w, s.clone())),
            }
        }
        Self { components: out }
    }

    /// Overall mean and covariance (law of total variance).
    pub fn moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        let dim = self.components[0].1.dim();
        let mut mean = DVector::zeros(dim);
        for (w, s) in &self.components {
            mean += s.mean() * *w;
        }
        let mut cov = DMatrix::zeros(dim, dim);
        for (w, s) in &self.components {
            let d = s.mean() - &mean;
            cov += (s.cov() + &d * d.transpose()) * *w;
        }
        (mean, cov)
    }

    /// Fourth cumulant of phase-space coordinate `index`; zero for a single
    /// Gaussian.
    pub fn fourth_cumulant(&self, index: usize) -> f64 {
        let (mean, _) = self.moments();
        let mu = mean[index];
        let mut m2 = 0.0;
        let mut m4 = 0.0;
        for (w, s) in &self.components {
            let d = s.mean()[index] - mu;
            let v = s.cov()[(index, index)];
            m2 += w * (d * d + v);
            m4 += w * (d.powi(4) + 6.0 * d * d * v + 3.0 * v * v);
        }
        m4 - 3.0 * m2 * m2
    }

    /// The moment-matched Gaussian.
    pub fn gaussian_approximation(&self) -> Result<GaussianState, ErrorChannelError> {
        let (mean, cov) = self.moments();
        Ok(GaussianState::new(mean, cov)?)
    }
}

pub fn mixture_moments(m: &MixtureState) -> (DVector<f64>, DMatrix<f64>) {
    m.moments()
}

/// Classification the noise-free syndrome of a branch would produce,
/// including the rotated rerun for pure p errors, and the basis it ends in.
fn branch_outcome(
    code: &SymbolicCode,
    cfg: &CodeConfig,
    channel: Channel,
    b: &Branch,
) -> Result<(Classification, Basis), QecError> {
    let model = cfg.variance_model()?;
    // a Gaussian spread behaves like a nonzero displacement on that quadrature
    let probe = [b.mean[0] + b.spread[0].sqrt(), b.mean[1] + b.spread[1].sqrt()];
    let basis = cfg.basis();
    let class = classify(&closed_form_syndrome(code, &model, basis, &[(channel, probe[0], probe[1])])?);
    if class == Classification::AmbiguousP && basis == Basis::Standard {
        let rerun = classify(&closed_form_syndrome(code, &model, Basis::Fourier, &[(channel, probe[0], probe[1])])?);
        let rerun = if rerun == Classification::AmbiguousP { Classification::Unclassifiable } else { rerun };
        return Ok((rerun, Basis::Fourier));
    }
    Ok((class, basis))
}

fn build_mixture(
    err: &ErrorConfig,
    cfg: &CodeConfig,
    corrected: bool,
) -> Result<MixtureState, ErrorChannelError> {
    err.validate()?;
    let code = SymbolicCode::new();
    let primary = CodePipeline::new(cfg, cfg.basis())?;
    let fourier = CodePipeline::new(cfg, Basis::Fourier)?;
    let mut comps = vec![(1.0 - err.gamma, primary.output_state(None, None)?)];
    for (ch, pc) in err.channel_weights() {
        for b in err.law.branches(err.amplitude, err.phase_bins) {
            let moments = ErrorMoments { mean: b.mean, cov: [[b.spread[0], 0.0], [0.0, b.spread[1]]] };
            let (class, basis) = branch_outcome(&code, cfg, ch, &b)?;
            let pipe = if basis == cfg.basis() { &primary } else { &fourier };
            let plan = if corrected { correction_plan(class, basis).ok() } else { None };
            let state = pipe.output_state(plan.as_ref(), Some((ch, moments)))?;
            comps.push((err.gamma * pc * b.weight, state));
        }
    }
    Ok(MixtureState::new(comps)?.simplify(1e-12))
}

/// Output of one corrected round averaged over the error law.
pub fn mixture_output(err: &ErrorConfig, cfg: &CodeConfig) -> Result<MixtureState, ErrorChannelError> {
    build_mixture(err, cfg, true)
}

/// Same round with the feedforward switched off.
pub fn mixture_output_uncorrected(err: &ErrorConfig, cfg: &CodeConfig) -> Result<MixtureState, ErrorChannelError> {
    build_mixture(err, cfg, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ch(k: u8) -> Channel {
        Channel::new(k).unwrap()
    }

    #[test]
    fn config_json() {
        let cfg = ErrorConfig::certain(ch(3), DisplacementLaw::XOnly { spread: Spread::Sign }, 2.0);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ErrorConfig>(&text).unwrap(), cfg);
        let uni: ErrorConfig =
            serde_json::from_str(r#"{"gamma":0.1,"channel":"uniform","law":{"kind":"general"},"amplitude":1}"#).unwrap();
        assert_eq!(uni.channel, ChannelPolicy::Uniform);
        assert_eq!(uni.phase_bins, 16);
        assert!(ErrorConfig::new(1.5, ChannelPolicy::Uniform, DisplacementLaw::General, 1.0).validate().is_err());
    }

    #[test]
    fn error_rate_follows_gamma() {
        let cfg = ErrorConfig::new(0.3, ChannelPolicy::Uniform, DisplacementLaw::General, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 20_000;
        let hits = (0..n).filter(|_| sample_error(&cfg, &mut rng).unwrap().occurred).count();
        let p = hits as f64 / n as f64;
        let se = (0.3 * 0.7 / n as f64).sqrt();
        assert!((p - 0.3).abs() < 5.0 * se, "{p}");
    }

    #[test]
    fn branch_moments_match_law_moments() {
        for law in [
            DisplacementLaw::General,
            DisplacementLaw::XOnly { spread: Spread::Sign },
            DisplacementLaw::POnly { spread: Spread::Gaussian },
        ] {
            let m = law.moments(1.7);
            let bs = law.branches(1.7, 16);
            let w: f64 = bs.iter().map(|b| b.weight).sum();
            assert!((w - 1.0).abs() < 1e-12);
            for (i, spread) in [(0, 0usize), (1, 1)] {
                let v: f64 = bs.iter().map(|b| b.weight * (b.mean[i] * b.mean[i] + b.spread[spread])).sum();
                assert!((v - m.cov[i][i]).abs() < 1e-12, "{law:?}");
            }
        }
    }

    #[test]
    fn fourth_cumulant_of_symmetric_pair() {
        // ±1 shifts of a variance-v Gaussian: κ4 = −2
        let v = 0.25;
        let c = |d: f64| GaussianState::new(DVector::from_vec(vec![d, 0.0]), DMatrix::identity(2, 2) * v).unwrap();
        let m = MixtureState::new(vec![(0.5, c(1.0)), (0.5, c(-1.0))]).unwrap();
        assert!((m.fourth_cumulant(0) + 2.0).abs() < 1e-12);
        assert!(m.fourth_cumulant(1).abs() < 1e-12);
        let (_, cov) = m.moments();
        assert!((cov[(0, 0)] - 1.25).abs() < 1e-12);
    }

    #[test]
    fn simplify_merges_duplicates() {
        let v = GaussianState::vacuum(1);
        let m = MixtureState::new(vec![(0.25, v.clone()), (0.75, v.clone())]).unwrap();
        let s = m.simplify(1e-12);
        assert_eq!(s.len(), 1);
        assert!((s.components()[0].0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn corrected_mixture_collapses_to_one_gaussian() {
        let cfg = CodeConfig::with_squeezing_db(-3.5);
        let err = ErrorConfig::certain(ch(4), DisplacementLaw::General, 6.0);
        let m = mixture_output(&err, &cfg).unwrap();
        // every phase bin is corrected to the same state
        assert_eq!(m.len(), 1);
        assert!(m.fourth_cumulant(0).abs() < 1e-12);
        let raw = mixture_output_uncorrected(&err, &cfg).unwrap();
        assert!(raw.fourth_cumulant(0) < -1.0);
    }
}
