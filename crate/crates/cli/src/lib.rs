//! Scenario runner for `anchorlab`: built-in reference scenarios,
//! JSON-configured orbits and logic queries, and an
//! envelope checker for recorded traces.

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod check;
pub mod config;
pub mod report;
pub mod scenarios;

pub use report::{Check, Format, Origin, ScenarioReport, Table, TraceRow};
pub use scenarios::{RunOptions, ScenarioInfo, CATALOG};

pub const EXIT_OK: u8 = 0;
/// A scenario check or an envelope check failed.
pub const EXIT_FAILED: u8 = 1;
/// The input could not be loaded or built.
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] anchorlab::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(_) => EXIT_FAILED,
            _ => EXIT_CONFIG,
        }
    }
}

/// A resolved target: its report and the destination the config asked for.
pub struct Outcome {
    pub report: ScenarioReport,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A built-in scenario name or a path to a JSON config.
pub fn resolve_target(target: &str, opts: &RunOptions) -> Result<Outcome, CliError> {
    if scenarios::find(target).is_some() {
        let report = scenarios::run_builtin(target, opts)?;
        return Ok(Outcome { report, output: None, format: None });
    }
    let path = Path::new(target);
    if !path.is_file() {
        return Err(CliError::Config(format!("`{target}` is neither a built-in scenario nor a file")));
    }
    config::run_config_file(path, opts)
}

pub struct RunArgs {
    pub targets: Vec<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub opts: RunOptions,
}

fn destination(args: &RunArgs, outcome: &Outcome, format: Format) -> Option<PathBuf> {
    match &args.out {
        Some(out) if args.targets.len() > 1 || out.is_dir() => {
            Some(out.join(format!("{}.{}", outcome.report.scenario, format.extension())))
        }
        Some(out) => Some(out.clone()),
        None => outcome.output.clone(),
    }
}

pub fn summary_line(report: &ScenarioReport) -> String {
    if report.passed {
        format!("PASS {} ({} checks)", report.scenario, report.checks.len())
    } else {
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        format!("FAIL {}: {}", report.scenario, failed.join("; "))
    }
}

/// Runs every target, writing tables to files or `stdout` and one summary
/// line per target to `log`. Returns whether every target passed.
pub fn run(args: &RunArgs, stdout: &mut dyn Write, log: &mut dyn Write) -> Result<bool, CliError> {
    if args.targets.is_empty() {
        return Err(CliError::Config("no targets given".into()));
    }
    let mut all = true;
    for target in &args.targets {
        let outcome = resolve_target(target, &args.opts)?;
        let format = args.format.or(outcome.format).unwrap_or_default();
        let bytes = report::render(&outcome.report, format)?;
        match destination(args, &outcome, format) {
            Some(path) => report::write_atomic(&path, &bytes)?,
            None => stdout.write_all(&bytes)?,
        }
        writeln!(log, "{}", summary_line(&outcome.report))?;
        all &= outcome.report.passed;
    }
    Ok(all)
}

pub fn list(out: &mut dyn Write) -> Result<(), CliError> {
    for s in &CATALOG {
        writeln!(out, "{:<26} {}", s.name, s.anchor)?;
        writeln!(out, "{:<26} {}", "", s.headline)?;
    }
    Ok(())
}
