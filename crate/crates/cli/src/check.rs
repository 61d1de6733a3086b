//! Envelope verification for a recorded `n,dist,…` trace.

use std::io::Read;
use std::path::Path;

use anchorlab::iteration::check_distances;
use anchorlab::{EnvelopeReport, EnvelopeSpec};

use crate::CliError;

/// Reads the `dist` column; rows must be `n = 0, 1, 2, …` in order.
pub fn read_distances<R: Read>(input: R) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Config(format!("trace has no `{name}` column")))
    };
    let (n_col, d_col) = (col("n")?, col("dist")?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| rec.get(c).map(str::trim).unwrap_or("");
        let n: usize = field(n_col)
            .parse()
            .map_err(|_| CliError::Config(format!("row {}: bad index `{}`", i + 1, field(n_col))))?;
        if n != i {
            return Err(CliError::Config(format!("row {}: expected n = {i}, found {n}", i + 1)));
        }
        let d: f64 = field(d_col)
            .parse()
            .map_err(|_| CliError::Config(format!("row {}: bad distance `{}`", i + 1, field(d_col))))?;
        if !d.is_finite() || d < 0.0 {
            return Err(CliError::Config(format!("row {}: distance {d} is not a finite non-negative number", i + 1)));
        }
        out.push(d);
    }
    if out.is_empty() {
        return Err(CliError::Config("trace has no rows".into()));
    }
    Ok(out)
}

pub fn read_envelope(text: &str) -> Result<EnvelopeSpec, CliError> {
    let spec: EnvelopeSpec = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(spec)
}

pub fn check_files(trace: &Path, envelope: &Path, tol: f64) -> Result<EnvelopeReport, CliError> {
    let distances = read_distances(std::fs::File::open(trace)?)?;
    let spec = read_envelope(&std::fs::read_to_string(envelope)?)?;
    check_distances(&distances, &spec, tol).map_err(|e| CliError::Config(e.to_string()))
}
