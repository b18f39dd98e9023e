//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use cvqec_core::error_channel::{ChannelPolicy, DisplacementLaw};
use cvqec_core::qec::{AncillaSqueezing, Channel, CodeConfig, MIN_WINDOW};
use cvqec_core::ErrorConfig;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum Experiment {
    #[serde(rename = "table2")]
    #[value(name = "table2")]
    Table2,
    #[serde(rename = "tableC1")]
    #[value(name = "tableC1")]
    TableC1,
    #[serde(rename = "syndrome-demo")]
    #[value(name = "syndrome-demo")]
    SyndromeDemo,
    #[serde(rename = "spectra")]
    #[value(name = "spectra")]
    Spectra,
    #[serde(rename = "witness")]
    #[value(name = "witness")]
    Witness,
    #[serde(rename = "mc-sweep")]
    #[value(name = "mc-sweep")]
    McSweep,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Table2,
        Experiment::TableC1,
        Experiment::SyndromeDemo,
        Experiment::Spectra,
        Experiment::Witness,
        Experiment::McSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Table2 => "table2",
            Self::TableC1 => "tableC1",
            Self::SyndromeDemo => "syndrome-demo",
            Self::Spectra => "spectra",
            Self::Witness => "witness",
            Self::McSweep => "mc-sweep",
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter varied by `mc-sweep` (and `witness`, for `r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    /// Uniform ancilla squeezing parameter.
    R,
    /// Error probability.
    Gamma,
    /// Error amplitude.
    Amplitude,
    /// Channel transmissivity.
    Eta,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::R => "r",
            Self::Gamma => "gamma",
            Self::Amplitude => "amplitude",
            Self::Eta => "eta",
        }
    }

    /// Configuration with the parameter set to `value`.
    pub fn apply(self, code: &CodeConfig, err: &ErrorConfig, value: f64) -> (CodeConfig, ErrorConfig) {
        let (mut code, mut err) = (*code, *err);
        match self {
            Self::R => code.ancilla_r = AncillaSqueezing::Uniform(value),
            Self::Gamma => err.gamma = value,
            Self::Amplitude => err.amplitude = value,
            Self::Eta => code.loss.channel = value,
        }
        (code, err)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn default_r() -> Self {
        Self { parameter: SweepParameter::R, values: vec![0.0, 0.4, 1.0, 2.0] }
    }
}

/// Error amplitude used when none is configured: ten times the vacuum
/// standard deviation, which is at least ten times every detector's
/// error-free standard deviation.
pub const DEFAULT_AMPLITUDE: f64 = 5.0;

fn default_error() -> ErrorConfig {
    ErrorConfig::new(
        1.0,
        ChannelPolicy::Fixed(Channel::new(3).expect("channel 3")),
        DisplacementLaw::General,
        DEFAULT_AMPLITUDE,
    )
}

fn default_trials() -> usize {
    100
}

fn default_window() -> usize {
    256
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub code: CodeConfig,
    #[serde(default = "default_error")]
    pub error: ErrorConfig,
    /// Rounds per table cell or sweep point; samples per trace for
    /// `syndrome-demo`.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Syndrome window length in samples.
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            code: CodeConfig::default(),
            error: default_error(),
            trials: if experiment == Experiment::SyndromeDemo { 2000 } else { default_trials() },
            seed: 0,
            out: default_out(),
            window: default_window(),
            sweep: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.window < MIN_WINDOW {
            return bad(format!("window {} is below the minimum of {MIN_WINDOW}", self.window));
        }
        if self.experiment == Experiment::SyndromeDemo && self.trials < self.window {
            return bad(format!("syndrome-demo needs trials ({}) >= window ({})", self.trials, self.window));
        }
        if let Some(sweep) = &self.sweep {
            if self.experiment == Experiment::McSweep && sweep.values.len() < 2 {
                return bad("a sweep needs at least two points".into());
            }
            for &v in &sweep.values {
                let (code, err) = sweep.parameter.apply(&self.code, &self.error, v);
                code.validate()?;
                err.validate()?;
            }
        }
        self.code.validate()?;
        self.error.validate()?;
        Ok(())
    }

    /// The sweep to run, falling back to the experiment's default.
    pub fn sweep_or_default(&self) -> SweepSpec {
        self.sweep.clone().unwrap_or_else(SweepSpec::default_r)
    }
}

/// What a report echoes of its configuration; the output directory is left
/// out so identical runs into different directories produce identical files.
#[derive(Debug, Serialize)]
pub struct ConfigEcho<'a> {
    pub experiment: Experiment,
    pub code: &'a CodeConfig,
    pub error: &'a ErrorConfig,
    pub trials: usize,
    pub seed: u64,
    pub window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<&'a SweepSpec>,
}

impl<'a> From<&'a ExperimentConfig> for ConfigEcho<'a> {
    fn from(c: &'a ExperimentConfig) -> Self {
        Self {
            experiment: c.experiment,
            code: &c.code,
            error: &c.error,
            trials: c.trials,
            seed: c.seed,
            window: c.window,
            sweep: c.sweep.as_ref(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_uses_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment": "tableC1"}"#).unwrap();
        assert_eq!(cfg.experiment, Experiment::TableC1);
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.window, 256);
        assert_eq!(cfg.error.amplitude, DEFAULT_AMPLITUDE);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"experiment": "table2", "trails": 5}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "table2", "code": {"r": 1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "table3"}"#).is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        let cases = [
            r#"{"experiment": "table2", "trials": 0}"#,
            r#"{"experiment": "table2", "window": 10}"#,
            r#"{"experiment": "syndrome-demo", "trials": 100}"#,
            r#"{"experiment": "mc-sweep", "sweep": {"parameter": "r", "values": [1.0]}}"#,
            r#"{"experiment": "mc-sweep", "sweep": {"parameter": "gamma", "values": [0.5, 1.5]}}"#,
        ];
        for text in cases {
            assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn full_document() {
        let text = r#"{
            "experiment": "mc-sweep",
            "code": {"ancilla_r": 0.4, "input": {"kind": "vacuum"}, "loss": {"channel": 0.96}},
            "error": {"gamma": 0.5, "channel": "uniform", "law": {"kind": "p-only"}, "amplitude": 3.0},
            "trials": 50,
            "seed": 7,
            "out": "results",
            "window": 64,
            "sweep": {"parameter": "eta", "values": [1.0, 0.9, 0.8]}
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.code.loss.channel, 0.96);
        assert_eq!(cfg.sweep.unwrap().parameter, SweepParameter::Eta);
    }
}
