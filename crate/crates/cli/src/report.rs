use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::tolerances::ToleranceTable;

/// A reported quantity: a double or an exact rational `num/den`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Exact(String),
}

impl Num {
    fn csv_field(&self) -> String {
        match self {
            Num::Float(x) => fmt_f64(*x),
            Num::Exact(s) => s.clone(),
        }
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Float(x)
    }
}

/// One gated check. `pass` is always `error_measure <= tolerance`, where
/// `error_measure` is derived from `estimate` and `expected` by the
/// constructor used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub estimate: Num,
    pub expected: Num,
    pub error_measure: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Record {
    fn gated(name: impl Into<String>, estimate: Num, expected: Num, error_measure: f64, tolerance: f64) -> Self {
        Record {
            name: name.into(),
            estimate,
            expected,
            error_measure,
            tolerance,
            pass: error_measure <= tolerance,
        }
    }

    /// `|estimate - expected|`.
    pub fn abs(name: impl Into<String>, estimate: f64, expected: f64, tolerance: f64) -> Self {
        Self::gated(name, estimate.into(), expected.into(), (estimate - expected).abs(), tolerance)
    }

    /// `|estimate - expected| / std_error`; a nonzero difference with zero
    /// standard error counts as `f64::MAX` standard errors.
    pub fn std_errors(name: impl Into<String>, estimate: f64, expected: f64, std_error: f64, tolerance: f64) -> Self {
        let diff = (estimate - expected).abs();
        let z = if diff == 0.0 {
            0.0
        } else if std_error > 0.0 {
            diff / std_error
        } else {
            f64::MAX
        };
        Self::gated(name, estimate.into(), expected.into(), z, tolerance)
    }

    /// Exact comparison of two rationals (or counts): error 0 or 1,
    /// tolerance 0.
    pub fn exact(name: impl Into<String>, estimate: impl ToString, expected: impl ToString) -> Self {
        let (e, x) = (estimate.to_string(), expected.to_string());
        let err = if e == x { 0.0 } else { 1.0 };
        Self::gated(name, Num::Exact(e), Num::Exact(x), err, 0.0)
    }

    /// `estimate >= bound` for integers: error is the shortfall.
    pub fn at_least(name: impl Into<String>, estimate: u64, bound: u64) -> Self {
        let short = bound.saturating_sub(estimate) as f64;
        Self::gated(name, Num::Exact(estimate.to_string()), Num::Exact(bound.to_string()), short, 0.0)
    }

    /// A nonnegative statistic against an upper bound (expected 0).
    pub fn at_most(name: impl Into<String>, estimate: f64, tolerance: f64) -> Self {
        Self::abs(name, estimate, 0.0, tolerance)
    }
}

/// Per-sample rows for plot-ready output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SampleTable {
    pub fn new(header: &[&str]) -> Self {
        SampleTable {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Fields outside the determinism contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub wall_time_s: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub tolerances: ToleranceTable,
    /// Effective parameters after defaults.
    pub parameters: Value,
    pub records: Vec<Record>,
    pub pass: bool,
    pub details: Value,
    pub samples: Option<SampleTable>,
    pub runtime: Runtime,
}

impl ReportEnvelope {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    /// The process exit code: 0 exactly when every record passes.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    /// JSON with the runtime block removed, for determinism comparisons.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.runtime = Runtime {
            wall_time_s: 0.0,
            workers: 0,
        };
        to_json(&copy)
    }
}

/// 17 significant digits in scientific notation; exact round trip.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Single JSON document, floats with 17 significant digits. Non-finite
/// floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Serialize(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Column order of the records CSV.
pub const CSV_HEADER: [&str; 7] = ["command", "name", "estimate", "expected", "error_measure", "tolerance", "pass"];

pub fn records_csv(report: &ReportEnvelope) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| CliError::Serialize(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    for r in &report.records {
        w.write_record([
            report.command.clone(),
            r.name.clone(),
            r.estimate.csv_field(),
            r.expected.csv_field(),
            fmt_f64(r.error_measure),
            fmt_f64(r.tolerance),
            r.pass.to_string(),
        ])
        .map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
}

pub fn samples_csv(table: &SampleTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| CliError::Serialize(e.to_string());
    w.write_record(&table.header).map_err(ser)?;
    for row in &table.rows {
        w.write_record(row).map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
}

/// `out.csv` -> `out.samples.csv`.
pub fn samples_path(out: &Path) -> PathBuf {
    out.with_extension("samples.csv")
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the report to `out` (stdout when `None`). CSV output writes the
/// records to `out` and, when the command produced per-sample rows, those
/// to [`samples_path`].
pub fn emit(report: &ReportEnvelope, format: Format, out: Option<&Path>) -> Result<()> {
    let body = match format {
        Format::Json => to_json(report)?,
        Format::Csv => records_csv(report)?,
    };
    match out {
        Some(path) => {
            write(path, &body)?;
            if let (Format::Csv, Some(table)) = (format, &report.samples) {
                write(&samples_path(path), &samples_csv(table)?)?;
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
    }
    Ok(())
}
