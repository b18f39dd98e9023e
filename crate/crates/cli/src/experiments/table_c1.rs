//! Output noise powers in dB next to the measured values.

use cvqec_core::gaussian::variance_to_db;
use cvqec_core::qec::{closed_form_output, Channel};
use serde::Serialize;

use super::RunSummary;
use crate::config::{ConfigEcho, ExperimentConfig};
use crate::reference::{noise_power, table_config, AncillaKind, InputKind, SOURCE};
use crate::{write_csv, write_json, HarnessError};

#[derive(Debug, Clone, Serialize)]
pub struct NoiseRow {
    pub input: &'static str,
    pub ancilla: &'static str,
    pub channel: u8,
    pub quadrature: &'static str,
    pub theory_db: f64,
    pub reference_db: Option<f64>,
    pub reference_error_db: Option<f64>,
    /// `theory − reference`.
    pub deviation_db: Option<f64>,
    pub reference_source: &'static str,
}

/// Theory rows for all channels, inputs and ancilla types.
pub fn noise_rows(cfg: &ExperimentConfig) -> Result<Vec<NoiseRow>, HarnessError> {
    let mut rows = Vec::new();
    for input in InputKind::ALL {
        for ancilla in AncillaKind::ALL {
            let code = table_config(&cfg.code, input, ancilla);
            for ch in Channel::ALL {
                let out = closed_form_output(&code, Some(ch))?;
                for (q, name) in ["x", "p"].into_iter().enumerate() {
                    let theory_db = variance_to_db(out.variance[q])?;
                    let measured = noise_power(input, ancilla, ch.number(), q);
                    rows.push(NoiseRow {
                        input: input.name(),
                        ancilla: ancilla.name(),
                        channel: ch.number(),
                        quadrature: name,
                        theory_db,
                        reference_db: measured.map(|m| m.value),
                        reference_error_db: measured.map(|m| m.error),
                        deviation_db: measured.map(|m| theory_db - m.value),
                        reference_source: SOURCE,
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'static str,
    config: ConfigEcho<'a>,
    reference_source: &'static str,
    rows: &'a [NoiseRow],
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    let rows = noise_rows(cfg)?;
    let csv = cfg.out.join("tableC1.csv");
    let json = cfg.out.join("tableC1.json");
    write_csv(&csv, &rows)?;
    write_json(&json, &Report { experiment: "tableC1", config: cfg.into(), reference_source: SOURCE, rows: &rows })?;
    let lines = rows
        .iter()
        .filter_map(|r| {
            r.reference_db.map(|m| {
                format!(
                    "{:<8} input, {:<8} ancillas, channel {} {}: theory {:6.2} dB  measured {:6.2} dB",
                    r.input, r.ancilla, r.channel, r.quadrature, r.theory_db, m
                )
            })
        })
        .collect();
    Ok(RunSummary { files: vec![csv, json], lines })
}
