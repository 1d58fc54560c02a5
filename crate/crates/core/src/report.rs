//! Machine-readable output: a versioned JSON envelope and a fixed-column
//! CSV table.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 5] = ["experiment", "alpha", "N", "value", "witness"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub experiment: String,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub value: f64,
    pub witness: String,
}

impl CsvRow {
    pub fn new(experiment: impl Into<String>, alpha: f64, n: usize, value: f64, witness: impl Into<String>) -> Self {
        CsvRow {
            experiment: experiment.into(),
            alpha,
            n,
            value,
            witness: witness.into(),
        }
    }
}

pub fn write_csv<W: Write>(rows: &[CsvRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let fmt = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(CSV_HEADER).map_err(fmt)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            format_float(r.alpha),
            r.n.to_string(),
            format_float(r.value),
            r.witness.clone(),
        ])
        .map_err(fmt)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, P: Serialize, R: Serialize> {
    pub schema: u32,
    pub command: &'a str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub params: P,
    pub result: R,
}

impl<'a, P: Serialize, R: Serialize> Envelope<'a, P, R> {
    pub fn new(command: &'a str, seed: u64, stamped: bool, params: P, result: R) -> Self {
        let timestamp = stamped.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Envelope {
            schema: SCHEMA_VERSION,
            command,
            seed,
            timestamp,
            params,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Process exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Format(_) => 3,
        Error::DimensionMismatch { .. } => 4,
        Error::InvalidArgument(_)
        | Error::OutsideDisc { .. }
        | Error::InsufficientNodes { .. }
        | Error::NotHermitian(_)
        | Error::ZeroBlochNorm => 5,
        Error::Io(_) => 6,
    }
}

pub const EXIT_USAGE: i32 = 2;
