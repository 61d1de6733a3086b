//! JSON run configurations: a built-in scenario with overrides, an inline
//! orbit, or a single logic query.

use std::path::{Path, PathBuf};

use anchorlab::iteration::CHECK_TOL;
use anchorlab::linalg::JsonScalar;
use anchorlab::operators::OperatorDescriptor;
use anchorlab::{
    anchored_implication, block_certify, common_fixed_point, envelope_check, reduced_implication_projection, run_orbit,
    valuate, Anchor, ComplexMatrix, EnvelopeSpec, EventSchedule, FixedPointPolicy, OperatorSequence, ProjectionOp,
    Proposition, StateVector, C64,
};
use serde::Deserialize;

use crate::report::{Check, Format, Origin, ScenarioReport, Table};
use crate::scenarios::{self, trace_table, RunOptions};
use crate::{CliError, Outcome};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub orbit: Option<OrbitConfig>,
    #[serde(default)]
    pub logic: Option<LogicConfig>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub n_max: Option<usize>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitConfig {
    pub operators: Vec<OperatorDescriptor>,
    /// Repeat the operator list forever; otherwise it is used once.
    #[serde(default = "yes")]
    pub cyclic: bool,
    pub x0: Vec<f64>,
    /// Reference point; derived from operator metadata when absent.
    #[serde(default)]
    pub z: Option<Vec<f64>>,
    pub n_max: usize,
    #[serde(default)]
    pub schedule: Option<EventSchedule>,
    #[serde(default)]
    pub waive_fixed_point: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicConfig {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    /// Generator projections of the anchor.
    pub anchor: Vec<ComplexMatrix>,
    pub psi: Vec<JsonScalar>,
}

fn invalid(what: &str) -> impl Fn(anchorlab::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{what}: {e}"))
}

pub fn parse(text: &str) -> Result<Config, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::Config("empty config".into()));
    }
    let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    if cfg.version != CONFIG_VERSION {
        return Err(CliError::Config(format!("unsupported config version {}", cfg.version)));
    }
    let bodies =
        usize::from(cfg.scenario.is_some()) + usize::from(cfg.orbit.is_some()) + usize::from(cfg.logic.is_some());
    if bodies != 1 {
        return Err(CliError::Config("exactly one of `scenario`, `orbit`, `logic` is required".into()));
    }
    if let Some(name) = &cfg.scenario {
        if scenarios::find(name).is_none() {
            return Err(CliError::Config(format!("unknown scenario `{name}`")));
        }
    }
    Ok(cfg)
}

pub fn run_config_file(path: &Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path)?;
    let cfg = parse(&text)?;
    let default_name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("config").to_string();
    let output = cfg.output.as_ref().map(|o| match path.parent() {
        Some(dir) if o.is_relative() => dir.join(o),
        _ => o.clone(),
    });
    let report = run_config(&cfg, &default_name, opts)?;
    Ok(Outcome { report, output, format: cfg.format })
}

/// Config values override command-line defaults.
pub fn run_config(cfg: &Config, default_name: &str, opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let opts = RunOptions { seed: cfg.seed.unwrap_or(opts.seed), n_max: cfg.n_max.or(opts.n_max) };
    let name = cfg.name.clone().unwrap_or_else(|| default_name.to_string());
    if let Some(s) = &cfg.scenario {
        return scenarios::run_builtin(s, &opts);
    }
    if let Some(o) = &cfg.orbit {
        return run_inline_orbit(&name, o, &opts);
    }
    match &cfg.logic {
        Some(l) => run_logic(&name, l),
        None => Err(CliError::Config("nothing to run".into())),
    }
}

fn run_inline_orbit(name: &str, cfg: &OrbitConfig, opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let ops = cfg
        .operators
        .iter()
        .map(OperatorDescriptor::build)
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid("operator"))?;
    let z = match &cfg.z {
        Some(z) => z.clone(),
        None => common_fixed_point(&ops)
            .map_err(invalid("fixed point"))?
            .point()
            .map(<[f64]>::to_vec)
            .ok_or_else(|| CliError::Config("no reference point `z` and none derivable".into()))?,
    };
    let seq = if cfg.cyclic { OperatorSequence::cyclic(ops) } else { OperatorSequence::finite(ops) }
        .map_err(invalid("sequence"))?;
    let policy = if cfg.waive_fixed_point { FixedPointPolicy::Waive } else { FixedPointPolicy::Verify };
    let n_max = opts.n_max.unwrap_or(cfg.n_max);
    let mut trace = run_orbit(&seq, &cfg.x0, &z, n_max, policy).map_err(invalid("orbit"))?;
    trace.metadata.seed = Some(opts.seed);

    let mut checks = vec![Check::holds(
        "distances are finite",
        Origin::Identity,
        trace.steps.iter().all(|s| s.dist.is_finite()),
        "",
    )];
    if policy == FixedPointPolicy::Verify {
        checks.push(Check::holds(
            "non-increase (Fejér monotone)",
            Origin::Identity,
            trace.first_increase(CHECK_TOL).is_none(),
            "",
        ));
    }
    let envelope = match &cfg.schedule {
        Some(schedule) => {
            schedule.validate().map_err(invalid("schedule"))?;
            checks.push(Check::accepted(
                "block certificates cover the claimed factors",
                Origin::Identity,
                block_certify(&seq, schedule, n_max),
            ));
            let spec = EnvelopeSpec::from_schedule(schedule, n_max);
            let env = envelope_check(&trace, &spec, CHECK_TOL)?;
            checks.push(Check::holds(
                "envelope bound holds",
                Origin::Identity,
                env.certified,
                env.first_violation.map(|n| format!("first violation at n = {n}")).unwrap_or_default(),
            ));
            trace = trace.with_schedule(schedule.clone());
            Some(spec)
        }
        None => None,
    };
    let table = trace_table(&trace, envelope.as_ref());
    Ok(ScenarioReport::new(name, "inline orbit", &format!("{} steps", n_max), checks, table)
        .with_details(&trace.metadata))
}

fn projection(m: &ComplexMatrix, what: &str) -> Result<ProjectionOp, CliError> {
    ProjectionOp::new(m.clone()).map_err(invalid(what))
}

fn run_logic(name: &str, cfg: &LogicConfig) -> Result<ScenarioReport, CliError> {
    let a = Proposition::new("A", projection(&cfg.a, "a")?);
    let b = Proposition::new("B", projection(&cfg.b, "b")?);
    let gens = cfg.anchor.iter().map(|m| projection(m, "anchor")).collect::<Result<Vec<_>, _>>()?;
    let anchor = Anchor::new(gens).map_err(invalid("anchor"))?;
    let psi = StateVector::new(cfg.psi.iter().map(|&s| C64::from(s)).collect()).map_err(invalid("psi"))?;

    let va = valuate(&a, &psi).map_err(invalid("valuation"))?;
    let vb = valuate(&b, &psi).map_err(invalid("valuation"))?;
    let imp = anchored_implication(&a, &b, &anchor, &psi).map_err(invalid("implication"))?;
    let mut checks = vec![Check::holds("valuation computed", Origin::Identity, true, "")];
    let mut rows = vec![
        vec!["v(A)".to_string(), va.bit().to_string()],
        vec!["v(B)".to_string(), vb.bit().to_string()],
        vec!["v(A => B)".to_string(), imp.bit().to_string()],
        vec!["side_condition".to_string(), u8::from(imp.side_condition_held).to_string()],
        vec!["vacuous".to_string(), u8::from(imp.vacuous).to_string()],
    ];
    if let Ok(reduced) = reduced_implication_projection(&a, &b, &anchor) {
        let r = valuate(&Proposition::new("¬A∨B", reduced), &psi)?;
        checks.push(Check::holds("agrees with I − E_A + E_A E_B", Origin::Identity, r.value == imp.value, ""));
        rows.push(vec!["v(reduced)".to_string(), r.bit().to_string()]);
    }
    let table = Table::rows(["quantity", "value"], rows);
    Ok(ScenarioReport::new(name, "inline logic query", "", checks, table).with_details(imp))
}
