//! CSV and JSON output for FER curves.
//!
//! Curve CSVs have the fixed header
//! `snr_db,trials,failures,fer,ci_low,ci_high,analytic,exact`; missing values
//! are empty cells. Floats use Rust's shortest round-trip formatting.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{Comparison, FerCurve};

pub const CURVE_HEADER: [&str; 8] = [
    "snr_db", "trials", "failures", "fer", "ci_low", "ci_high", "analytic", "exact",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_curve_csv<W: Write>(curve: &FerCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER).map_err(csv_err)?;
    for p in &curve.points {
        w.write_record([
            p.snr_db.to_string(),
            p.trials.to_string(),
            p.failures.to_string(),
            p.fer.to_string(),
            p.ci_low.to_string(),
            p.ci_high.to_string(),
            opt(p.analytic),
            opt(p.exact),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One parsed row of a curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub snr_db: f64,
    pub trials: u64,
    pub failures: u64,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic: Option<f64>,
    pub exact: Option<f64>,
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    if header != CURVE_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {header:?}"),
        });
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                msg: e.to_string(),
            })
        })
        .collect()
}

/// `snr_db` then `<label>_fer,<label>_analytic,<label>_exact` per curve.
pub fn write_comparison_csv<W: Write>(cmp: &Comparison, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["snr_db".to_string()];
    for l in &cmp.labels {
        header.extend([format!("{l}_fer"), format!("{l}_analytic"), format!("{l}_exact")]);
    }
    w.write_record(&header).map_err(csv_err)?;
    for (snr, row) in cmp.snr_db.iter().zip(&cmp.rows) {
        let mut rec = vec![snr.to_string()];
        for &(fer, a, e) in row {
            rec.extend([fer.to_string(), opt(a), opt(e)]);
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-scheme entry of `summary.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub scheme: String,
    pub field_order: usize,
    pub dmin: Option<usize>,
    pub slope: Option<f64>,
    pub slope_source: Option<String>,
    pub runtime_seconds: f64,
    pub csv: String,
    pub curve: String,
}

/// Wall-clock summary of an experiment. Unlike the curve files it is not
/// byte-stable, since it records runtimes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub runs: Vec<RunSummary>,
    pub comparison: Option<String>,
    pub total_runtime_seconds: f64,
}

impl ExperimentSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
