//! Scenario reports and their CSV / JSON renderings.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// A fixed reference value (staircase coordinate, table entry).
    Reference,
    /// An independent closed form or direct recomputation.
    Oracle,
    /// A structural identity that must hold for any input.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub origin: Origin,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// `|observed − expected| ≤ tol`
    pub fn close(name: impl Into<String>, origin: Origin, expected: f64, observed: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            origin,
            passed: (observed - expected).abs() <= tol,
            expected: Some(expected),
            observed: Some(observed),
            tolerance: Some(tol),
            detail: None,
        }
    }

    pub fn holds(name: impl Into<String>, origin: Origin, passed: bool, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        Self {
            name: name.into(),
            origin,
            passed,
            expected: None,
            observed: None,
            tolerance: None,
            detail: (!detail.is_empty()).then_some(detail),
        }
    }

    /// Passes when `result` is an error; the error text becomes the detail.
    pub fn refused<T>(name: impl Into<String>, origin: Origin, result: anchorlab::Result<T>) -> Self {
        match result {
            Ok(_) => Self::holds(name, origin, false, "accepted"),
            Err(e) => Self::holds(name, origin, true, e.to_string()),
        }
    }

    /// Passes when `result` is `Ok`; an error becomes the detail.
    pub fn accepted<T>(name: impl Into<String>, origin: Origin, result: anchorlab::Result<T>) -> Self {
        match result {
            Ok(_) => Self::holds(name, origin, true, ""),
            Err(e) => Self::holds(name, origin, false, e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub dist: f64,
    pub envelope: Option<f64>,
    pub event_flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Table {
    Trace { rows: Vec<TraceRow> },
    Rows { header: Vec<String>, rows: Vec<Vec<String>> },
}

impl Table {
    pub fn rows<S: Into<String>>(header: impl IntoIterator<Item = S>, rows: Vec<Vec<String>>) -> Self {
        Self::Rows { header: header.into_iter().map(Into::into).collect(), rows }
    }

    pub fn trace_rows(&self) -> Option<&[TraceRow]> {
        match self {
            Self::Trace { rows } => Some(rows),
            Self::Rows { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub anchor: String,
    pub headline: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    pub table: Table,
}

impl ScenarioReport {
    pub fn new(scenario: &str, anchor: &str, headline: &str, checks: Vec<Check>, table: Table) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        Self {
            scenario: scenario.into(),
            anchor: anchor.into(),
            headline: headline.into(),
            passed,
            checks,
            details: None,
            table,
        }
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).ok();
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// Shortest decimal that round-trips to the same double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    match table {
        Table::Trace { rows } => {
            w.write_record(["n", "dist", "envelope", "event_flag"])?;
            for r in rows {
                w.write_record([
                    r.n.to_string(),
                    fmt_f64(r.dist),
                    r.envelope.map(fmt_f64).unwrap_or_default(),
                    u8::from(r.event_flag).to_string(),
                ])?;
            }
        }
        Table::Rows { header, rows } => {
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn render(report: &ScenarioReport, format: Format) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(&report.table, &mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, report)?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
