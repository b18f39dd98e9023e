//! Detector traces for an error whose phase is swept slowly through two
//! full cycles, one file per injected channel.

use cvqec_core::qec::{
    classify, measure_syndrome, substream, Channel, Classification, CodePipeline, Detector, SyndromeRecord,
};
use serde::Serialize;

use super::RunSummary;
use crate::config::{ConfigEcho, ExperimentConfig};
use crate::{write_json, HarnessError};

const SWEEP_CYCLES: f64 = 2.0;

/// Displacement of sample `j` of `n`: amplitude `a`, phase advancing
/// linearly through [`SWEEP_CYCLES`] turns.
pub fn swept_displacement(a: f64, j: usize, n: usize) -> [f64; 2] {
    let phi = std::f64::consts::TAU * SWEEP_CYCLES * j as f64 / n as f64;
    [a * phi.cos(), a * phi.sin()]
}

#[derive(Debug, Serialize)]
struct TraceSummary {
    injected: Option<u8>,
    file: Option<String>,
    classification: Classification,
    matched: bool,
    flagged: Vec<Detector>,
    syndrome: SyndromeRecord,
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'static str,
    config: ConfigEcho<'a>,
    samples: usize,
    traces: Vec<TraceSummary>,
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    let basis = cfg.code.basis();
    let pipe = CodePipeline::new(&cfg.code, basis)?;
    let n = cfg.trials;
    let a = cfg.error.amplitude;
    let header: Vec<String> = std::iter::once("sample".to_string())
        .chain(Detector::ALL.iter().map(|d| format!("{}_{d:?}", d.quadrature(basis))))
        .collect();

    let mut files = Vec::new();
    let mut traces = Vec::new();
    let injected: Vec<Option<Channel>> = Channel::ALL.iter().copied().map(Some).chain([None]).collect();
    for (k, channel) in injected.into_iter().enumerate() {
        let trace = pipe.sample_trace(channel, |j, _| swept_displacement(a, j, n), n, &mut substream(cfg.seed, k as u64));
        let syndrome = measure_syndrome(&trace, pipe.baselines())?;
        let classification = classify(&syndrome);
        let expected = channel.map_or(Classification::NoError, Classification::Channel);
        let file = match channel {
            Some(ch) => {
                let path = cfg.out.join(format!("syndrome_ch{ch}.csv"));
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(&header)?;
                for (j, r) in trace.readouts.iter().enumerate() {
                    w.write_record(std::iter::once(j.to_string()).chain(r.iter().map(f64::to_string)))?;
                }
                w.flush()?;
                let name = path.file_name().map(|f| f.to_string_lossy().into_owned());
                files.push(path);
                name
            }
            None => None,
        };
        traces.push(TraceSummary {
            injected: channel.map(Channel::number),
            file,
            classification,
            matched: classification == expected,
            flagged: syndrome.flagged(),
            syndrome,
        });
    }

    let lines = traces
        .iter()
        .map(|t| {
            let src = t.injected.map_or("no error".to_string(), |k| format!("channel {k}"));
            format!("{src:<10}: flagged {:?}, classified as {}", t.flagged, t.classification)
        })
        .collect();
    let json = cfg.out.join("syndrome_summary.json");
    write_json(&json, &Report { experiment: "syndrome-demo", config: cfg.into(), samples: n, traces })?;
    files.push(json);
    Ok(RunSummary { files, lines })
}
