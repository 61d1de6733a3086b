//! Built-in scenarios. Each one rebuilds a reference construction,
//! checks it against embedded expected values and reports the outcome.

use std::f64::consts::FRAC_1_SQRT_2;

use anchorlab::iteration::{slope_bounds, Block, EnvelopeSpec, EventSchedule, OrbitTrace, TightnessScenario};
use anchorlab::linalg::{norm, JsonScalar};
use anchorlab::logic::NoSynonymRow;
use anchorlab::operators::DEFAULT_SEED;
use anchorlab::{
    anchored_implication, anchored_run, block_certify, classical_rate_check, commutator, envelope_check,
    envelope_value, no_synonym_table, reduced_implication_projection, run_orbit, spectral_threshold_projection,
    subspace_meet, tau_anchored_implication, tightness_schedule, valuate, Anchor, ComplexMatrix, EffectOp,
    FixedPointPolicy, OperatorMap, OperatorSequence, ProjectionOp, Proposition, RealMatrix, StateVector,
    TightnessVariant, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::report::{fmt_f64, Check, Origin, ScenarioReport, Table, TraceRow};
use crate::CliError;

/// Absolute tolerance for reference coordinates and equality checks.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    /// Orbit length override for the scenarios that have a free horizon.
    pub n_max: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, n_max: None }
    }
}

type Runner = fn(&RunOptions) -> Result<ScenarioReport, CliError>;

pub struct ScenarioInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    pub headline: &'static str,
    pub run: Runner,
}

pub const CATALOG: [ScenarioInfo; 12] = [
    ScenarioInfo {
        name: "fig1-periodic",
        anchor: "periodic blocks, α = 0.8, M = 4, x0 = (1,0), z = 0",
        headline: "dist(n) = 0.8^⌊n/4⌋, e.g. (12, 0.512), (28, 0.2097152)",
        run: fig1_periodic,
    },
    ScenarioInfo {
        name: "fig2-envelope",
        anchor: "staircase and log-envelope for the fig1-periodic orbit",
        headline: "equality with the envelope at n = 4, 8, …, 28; slope ln(0.8)/4",
        run: fig2_envelope,
    },
    ScenarioInfo {
        name: "no-events-rotation",
        anchor: "no events: rotation-only orbit",
        headline: "dist(n) = 1 for 10⁴ steps; every λ < 1 envelope fails at its first event",
        run: no_events_rotation,
    },
    ScenarioInfo {
        name: "hetero-alternating",
        anchor: "alternating blocks (0.7, 2), (0.9, 3)",
        headline: "dist(n_K) = 0.63^(K/2) for even K ≤ 20; slope (ln 0.7 + ln 0.9)/5",
        run: hetero_alternating,
    },
    ScenarioInfo {
        name: "borderline-slope",
        anchor: "heterogeneous blocks at the borderline λ_k = 1 − 1/k², N_k = k²",
        headline: "prefix slope < 0 and ≥ −1e−3 at K = 10³, increasing toward 0",
        run: borderline_slope,
    },
    ScenarioInfo {
        name: "anchored-invariant",
        anchor: "anchored convergence: T(x,y) = (x, 0.5y), P = diag(0,1)",
        headline: "unique restricted fixed point (0,0); rate 0.5^n; Fix(T) = {(c,0)}",
        run: anchored_invariant,
    },
    ScenarioInfo {
        name: "logic-noncommuting-anchor",
        anchor: "non-commuting anchor P onto (1,1)/√2",
        headline: "[E_B, P] = ½[[0,1],[−1,0]]; implication 0 at e₁ with A, B true",
        run: logic_noncommuting_anchor,
    },
    ScenarioInfo {
        name: "logic-commuting-reduction",
        anchor: "classical reduction on commuting triples",
        headline: "500 random triples × 100 eigenstates, 0 mismatches",
        run: logic_commuting_reduction,
    },
    ScenarioInfo {
        name: "logic-no-synonym",
        anchor: "no uniform synonym across two anchor regimes",
        headline: "tables agree at 00, 01, 10 and differ only at 11",
        run: logic_no_synonym,
    },
    ScenarioInfo {
        name: "effects-mini1",
        anchor: "threshold effects, commuting pair",
        headline: "reduced projection = I",
        run: effects_mini1,
    },
    ScenarioInfo {
        name: "effects-mini2",
        anchor: "threshold effects, non-commuting effect",
        headline: "P_{B,0.8} = rank-one onto (1,−1)/√2; valuation 0",
        run: effects_mini2,
    },
    ScenarioInfo {
        name: "tightness-nonperiodic",
        anchor: "envelope tightness, non-periodic construction",
        headline: "dist(n) = E(n)·dist(0) at every n ≥ n₁",
        run: tightness_nonperiodic,
    },
];

pub fn find(name: &str) -> Option<&'static ScenarioInfo> {
    CATALOG.iter().find(|s| s.name == name)
}

pub fn run_builtin(name: &str, opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let info = find(name).ok_or_else(|| CliError::Config(format!("unknown scenario `{name}`")))?;
    (info.run)(opts)
}

fn report(info_name: &str, checks: Vec<Check>, table: Table) -> ScenarioReport {
    let info = find(info_name).expect("catalog name");
    ScenarioReport::new(info.name, info.anchor, info.headline, checks, table)
}

/// Trace table with `envelope = E(n) · dist(0)` from the first event on.
pub fn trace_table(trace: &OrbitTrace, envelope: Option<&EnvelopeSpec>) -> Table {
    let d0 = trace.dist(0).unwrap_or(0.0);
    let rows = trace
        .steps
        .iter()
        .map(|s| TraceRow {
            n: s.n,
            dist: s.dist,
            envelope: envelope.and_then(|e| envelope_value(e, s.n).ok()).map(|v| v * d0),
            event_flag: envelope.is_some_and(|e| e.is_event(s.n)),
        })
        .collect();
    Table::Trace { rows }
}

fn max_deviation(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    pairs.map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// iteration scenarios
// ---------------------------------------------------------------------------

/// Reference coordinates of the periodic staircase.
pub const STAIRCASE: [(usize, f64); 32] = [
    (0, 1.0),
    (1, 1.0),
    (2, 1.0),
    (3, 1.0),
    (4, 0.8),
    (5, 0.8),
    (6, 0.8),
    (7, 0.8),
    (8, 0.64),
    (9, 0.64),
    (10, 0.64),
    (11, 0.64),
    (12, 0.512),
    (13, 0.512),
    (14, 0.512),
    (15, 0.512),
    (16, 0.4096),
    (17, 0.4096),
    (18, 0.4096),
    (19, 0.4096),
    (20, 0.32768),
    (21, 0.32768),
    (22, 0.32768),
    (23, 0.32768),
    (24, 0.262144),
    (25, 0.262144),
    (26, 0.262144),
    (27, 0.262144),
    (28, 0.2097152),
    (29, 0.2097152),
    (30, 0.2097152),
    (31, 0.2097152),
];

const ALPHA: f64 = 0.8;
const PERIOD: usize = 4;

fn staircase_orbit(n_max: usize) -> Result<(TightnessScenario, OrbitTrace), CliError> {
    let t = tightness_schedule(&TightnessVariant::Periodic { lambda: ALPHA, gap: PERIOD })?;
    let trace = run_orbit(&t.sequence, &[1.0, 0.0], &[0.0, 0.0], n_max, FixedPointPolicy::Verify)?
        .with_schedule(t.schedule.clone());
    Ok((t, trace))
}

fn fig1_periodic(opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let n_max = opts.n_max.unwrap_or(31);
    let (t, trace) = staircase_orbit(n_max)?;
    let mut checks: Vec<Check> = STAIRCASE
        .iter()
        .filter(|(n, _)| *n <= n_max)
        .map(|&(n, y)| Check::close(format!("dist({n})"), Origin::Reference, y, trace.steps[n].dist, EXACT_TOL))
        .collect();
    let closed_form = max_deviation(trace.steps.iter().map(|s| (s.dist, ALPHA.powi((s.n / PERIOD) as i32))));
    checks.push(Check::close("closed form 0.8^⌊n/4⌋ (max deviation)", Origin::Oracle, 0.0, closed_form, EXACT_TOL));
    checks.push(Check::holds(
        "non-increase between events",
        Origin::Identity,
        trace.first_increase(EXACT_TOL).is_none(),
        "",
    ));
    let certs = block_certify(&t.sequence, &t.schedule, n_max)?;
    let worst = max_deviation(certs.iter().map(|c| (c.certificate, ALPHA)));
    checks.push(Check::close("block certificates = 0.8 (max deviation)", Origin::Oracle, 0.0, worst, EXACT_TOL));
    let table = trace_table(&trace, Some(&t.envelope));
    Ok(report("fig1-periodic", checks, table).with_details(certs))
}

fn fig2_envelope(opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let n_max = opts.n_max.unwrap_or(31);
    let (t, trace) = staircase_orbit(n_max)?;
    let env = envelope_check(&trace, &t.envelope, EXACT_TOL)?;
    let mut checks = vec![
        Check::holds("envelope certified for all n ≥ 4", Origin::Identity, env.certified, ""),
        Check::holds(
            "equality with the envelope at every n ≥ 4",
            Origin::Oracle,
            env.tight_everywhere(),
            format!("{} of {} indices tight", env.tight_indices.len(), env.checked),
        ),
    ];
    let d = trace.distances();
    let d0 = d[0];
    let events: Vec<usize> = (PERIOD..=n_max).step_by(PERIOD).collect();
    for &n in &events {
        let bound = envelope_value(&t.envelope, n)? * d0;
        checks.push(Check::close(format!("equality at event {n}"), Origin::Reference, bound, d[n], EXACT_TOL));
    }
    // the same bound measured from the first event: λ^{⌊(n−4)/4⌋} · dist(4)
    let shifted = (PERIOD..=n_max).all(|n| {
        let b = ALPHA.powi(((n - PERIOD) / PERIOD) as i32) * d[PERIOD];
        d[n] <= b + EXACT_TOL && (n % PERIOD != 0 || (d[n] - b).abs() <= EXACT_TOL)
    });
    checks.push(Check::holds("dist(n) ≤ λ^⌊(n−4)/4⌋·dist(4), equal at events", Origin::Oracle, shifted, ""));
    let drops = events.windows(2).all(|w| d[w[1]] <= ALPHA * d[w[0]] + EXACT_TOL);
    checks.push(Check::holds("event drop dist(n_k) ≤ λ·dist(n_{k−1})", Origin::Identity, drops, ""));
    if let (Some(&first), Some(&last)) = (events.first(), events.last()) {
        if last > first {
            let slope = (d[last].ln() - d[first].ln()) / (last - first) as f64;
            checks.push(Check::close(
                "inter-event log-slope",
                Origin::Reference,
                ALPHA.ln() / PERIOD as f64,
                slope,
                EXACT_TOL,
            ));
        }
    }
    let declared = t.envelope.log_slope().unwrap_or(f64::NAN);
    checks.push(Check::close("envelope log-slope ln λ / M", Origin::Identity, ALPHA.ln() / 4.0, declared, EXACT_TOL));
    let table = trace_table(&trace, Some(&t.envelope));
    Ok(report("fig2-envelope", checks, table).with_details(env))
}

fn no_events_rotation(opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let n_max = opts.n_max.unwrap_or(10_000);
    let seq = OperatorSequence::cyclic(vec![OperatorMap::quarter_turn()])?;
    let trace = run_orbit(&seq, &[1.0, 0.0], &[0.0, 0.0], n_max, FixedPointPolicy::Verify)?;
    let drift = max_deviation(trace.steps.iter().map(|s| (s.dist, 1.0)));
    let mut checks = vec![Check::close("dist(n) = 1 (max drift)", Origin::Reference, 0.0, drift, EXACT_TOL)];
    for lambda in [0.5, ALPHA, 0.99, 0.999_999] {
        let spec = EnvelopeSpec::PeriodicFloor { lambda, gap: PERIOD, first_event: PERIOD };
        let env = envelope_check(&trace, &spec, EXACT_TOL)?;
        checks.push(Check::holds(
            format!("λ = {lambda} envelope violated at the first event"),
            Origin::Identity,
            !env.certified && env.first_violation == Some(PERIOD),
            format!("first violation {:?}", env.first_violation),
        ));
    }
    let claimed = EventSchedule::periodic(ALPHA, PERIOD, PERIOD)?;
    checks.push(Check::refused(
        "claimed λ = 0.8 blocks are not certifiable",
        Origin::Identity,
        block_certify(&seq, &claimed, n_max.max(PERIOD)),
    ));
    let spec = EnvelopeSpec::PeriodicFloor { lambda: ALPHA, gap: PERIOD, first_event: PERIOD };
    Ok(report("no-events-rotation", checks, trace_table(&trace, Some(&spec))))
}

fn hetero_alternating(_: &RunOptions) -> Result<ScenarioReport, CliError> {
    const PAIRS: usize = 10;
    let blocks: Vec<Block> = (0..PAIRS).flat_map(|_| [Block::new(0.7, 2), Block::new(0.9, 3)]).collect();
    let t = tightness_schedule(&TightnessVariant::HeterogeneousExact { blocks: blocks.clone() })?;
    let trace = run_orbit(&t.sequence, &[1.0, 0.0], &[0.0, 0.0], t.n_max, FixedPointPolicy::Verify)?;
    let d = trace.distances();
    let mut checks = Vec::new();
    for k in (2..=2 * PAIRS).step_by(2) {
        let n_k = 5 * k / 2;
        checks.push(Check::close(
            format!("dist(n_{k}) = 0.63^{}", k / 2),
            Origin::Oracle,
            0.63f64.powi((k / 2) as i32),
            d[n_k],
            EXACT_TOL,
        ));
    }
    let env = envelope_check(&trace, &t.envelope, EXACT_TOL)?;
    checks.push(Check::holds("product envelope certified", Origin::Identity, env.certified, ""));
    checks.push(Check::holds("product envelope attained at every n ≥ n₁", Origin::Oracle, env.tight_everywhere(), ""));
    let certs = block_certify(&t.sequence, &t.schedule, t.n_max)?;
    let worst = max_deviation(certs.iter().zip(&blocks).map(|(c, b)| (c.certificate, b.lambda)));
    checks.push(Check::close("block certificates = claimed (max deviation)", Origin::Oracle, 0.0, worst, EXACT_TOL));
    let period_slope = (0.7f64.ln() + 0.9f64.ln()) / 5.0;
    for k in (2..=2 * PAIRS).step_by(2) {
        let s = slope_bounds(&t.schedule, k)?;
        checks.push(Check::close(
            format!("prefix slope K = {k}"),
            Origin::Reference,
            period_slope,
            s.prefix_slope,
            EXACT_TOL,
        ));
    }
    Ok(report("hetero-alternating", checks, trace_table(&trace, Some(&t.envelope))).with_details(certs))
}

/// `λ_k = 1 − 1/k²`, `N_k = k²` for `k = 2, …, K + 1` (`k = 1` gives `λ = 0`).
pub fn borderline_blocks(count: usize) -> Vec<Block> {
    (2..count + 2)
        .map(|k| {
            let k2 = (k * k) as f64;
            Block::new(1.0 - 1.0 / k2, k * k)
        })
        .collect()
}

fn borderline_slope(_: &RunOptions) -> Result<ScenarioReport, CliError> {
    const PREFIXES: [usize; 3] = [10, 100, 1000];
    let schedule = EventSchedule::heterogeneous(borderline_blocks(1000))?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for k in PREFIXES {
        let s = slope_bounds(&schedule, k)?;
        // Σ_{j=2}^{K+1} ln(1 − 1/j²) telescopes to ln((K+2) / (2(K+1)))
        let kf = k as f64;
        let log_sum = ((kf + 2.0) / (2.0 * (kf + 1.0))).ln();
        let steps = (kf + 1.0) * (kf + 2.0) * (2.0 * kf + 3.0) / 6.0 - 1.0;
        let oracle = log_sum / steps;
        checks.push(Check::close(
            format!("prefix slope K = {k} (telescoped)"),
            Origin::Oracle,
            oracle,
            s.prefix_slope,
            1e-10 * oracle.abs(),
        ));
        checks.push(Check::holds(
            format!("prefix slope K = {k} is negative"),
            Origin::Identity,
            s.prefix_slope < 0.0,
            "",
        ));
        rows.push(vec![k.to_string(), fmt_f64(steps), fmt_f64(log_sum), fmt_f64(s.prefix_slope)]);
        slopes.push(s.prefix_slope);
    }
    checks.push(Check::holds(
        "prefix slope at K = 1000 is ≥ −1e−3",
        Origin::Reference,
        slopes[2] >= -1e-3,
        fmt_f64(slopes[2]),
    ));
    checks.push(Check::holds(
        "prefix slopes increase toward 0 over K = 10, 100, 1000",
        Origin::Reference,
        slopes.windows(2).all(|w| w[0] < w[1]),
        "",
    ));
    // the first ten blocks as an actual orbit: 505 steps
    let t = tightness_schedule(&TightnessVariant::HeterogeneousExact { blocks: borderline_blocks(10) })?;
    let trace = run_orbit(&t.sequence, &[1.0, 0.0], &[0.0, 0.0], t.n_max, FixedPointPolicy::Verify)?;
    let env = envelope_check(&trace, &t.envelope, EXACT_TOL)?;
    checks.push(Check::holds("K = 10 orbit attains the product envelope", Origin::Oracle, env.tight_everywhere(), ""));
    checks.push(Check::close(
        "K = 10 orbit final distance",
        Origin::Oracle,
        12.0 / 22.0,
        trace.dist(t.n_max).unwrap_or(f64::NAN),
        EXACT_TOL,
    ));
    let table = Table::rows(["K", "steps", "log_factor_sum", "prefix_slope"], rows);
    Ok(report("borderline-slope", checks, table))
}

fn tightness_nonperiodic(_: &RunOptions) -> Result<ScenarioReport, CliError> {
    let blocks = vec![
        Block::new(0.5, 1),
        Block::new(0.9, 3),
        Block::new(0.7, 2),
        Block::new(0.8, 5),
        Block::new(0.6, 1),
        Block::new(0.95, 4),
        Block::new(0.75, 2),
    ];
    let t = tightness_schedule(&TightnessVariant::HeterogeneousExact { blocks: blocks.clone() })?;
    let trace = run_orbit(&t.sequence, &[3.0, 4.0], &[0.0, 0.0], t.n_max, FixedPointPolicy::Verify)?;
    let env = envelope_check(&trace, &t.envelope, EXACT_TOL)?;
    let mut checks = vec![
        Check::holds("envelope certified", Origin::Identity, env.certified, ""),
        Check::holds(
            "dist(n) = E(n)·dist(0) at every n ≥ n₁",
            Origin::Oracle,
            env.tight_everywhere(),
            format!("max |slack| {:e}", env.max_slack.abs().max(env.min_slack.abs())),
        ),
        Check::holds("non-increase between events", Origin::Identity, trace.first_increase(EXACT_TOL).is_none(), ""),
    ];
    let certs = block_certify(&t.sequence, &t.schedule, t.n_max)?;
    let worst = max_deviation(certs.iter().zip(&blocks).map(|(c, b)| (c.certificate, b.lambda)));
    checks.push(Check::close("block certificates = claimed (max deviation)", Origin::Oracle, 0.0, worst, EXACT_TOL));
    let product: f64 = blocks.iter().map(|b| b.lambda).product();
    checks.push(Check::close(
        "final distance = 5·∏λ_k",
        Origin::Oracle,
        5.0 * product,
        trace.dist(t.n_max).unwrap_or(f64::NAN),
        EXACT_TOL,
    ));
    Ok(report("tightness-nonperiodic", checks, trace_table(&trace, Some(&t.envelope))).with_details(certs))
}

fn anchored_invariant(opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let n_max = opts.n_max.unwrap_or(100);
    let t = OperatorMap::linear(RealMatrix::diag(&[1.0, 0.5]))?;
    let p = ProjectionOp::diag(&[0.0, 1.0])?;
    let r = anchored_run(&t, &p, &[3.0, 2.0], 1, 0.5, n_max)?;
    let closed_form = max_deviation(r.distances.iter().enumerate().map(|(n, d)| (*d, 2.0 * 0.5f64.powi(n as i32))));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst_fixed: f64 = 0.0;
    for _ in 0..16 {
        let c: f64 = rng.random_range(-10.0..10.0);
        worst_fixed = worst_fixed.max(t.fixed_point_residual(&[c, 0.0])?);
    }
    let checks = vec![
        Check::close("restricted fixed point is (0,0)", Origin::Reference, 0.0, norm(&r.fixed_point), EXACT_TOL),
        Check::holds(
            format!("rate bound verified for 1 ≤ n ≤ {n_max} (λ = 0.5, N = 1)"),
            Origin::Reference,
            r.checked == n_max,
            format!("max gap {:e}", r.max_gap),
        ),
        Check::close("dist(n) = 2·0.5^n (max deviation)", Origin::Oracle, 0.0, closed_form, EXACT_TOL),
        Check::close("dim Fix(T) on the whole plane", Origin::Reference, 1.0, r.global_fixed_dim as f64, 0.0),
        Check::close("sampled (c, 0) are fixed (max residual)", Origin::Identity, 0.0, worst_fixed, 0.0),
        Check::refused(
            "single-map rate refused on the whole plane",
            Origin::Reference,
            classical_rate_check(&t, 1, 0.5, &[3.0, 2.0], None, 10),
        ),
        Check::refused(
            "non-commuting pair (R_{π/2}, diag(1,0)) refused",
            Origin::Oracle,
            anchored_run(&OperatorMap::quarter_turn(), &ProjectionOp::diag(&[1.0, 0.0])?, &[3.0, 2.0], 1, 0.5, 10),
        ),
    ];
    let rows = r
        .distances
        .iter()
        .enumerate()
        .map(|(n, &dist)| TraceRow {
            n,
            dist,
            envelope: (n >= 1).then(|| 0.5f64.powi(n as i32) * r.distances[0]),
            event_flag: n >= 1,
        })
        .collect();
    Ok(report("anchored-invariant", checks, Table::Trace { rows }).with_details(&r))
}

// ---------------------------------------------------------------------------
// logic scenarios
// ---------------------------------------------------------------------------

fn bit(b: bool) -> String {
    u8::from(b).to_string()
}

fn logic_noncommuting_anchor(_: &RunOptions) -> Result<ScenarioReport, CliError> {
    let eb = ProjectionOp::diag(&[1.0, 0.0])?;
    let a = Proposition::new("A", eb.clone());
    let b = Proposition::new("B", eb.clone());
    let p = ProjectionOp::rank_one_real(&[1.0, 1.0])?;
    let anchor = Anchor::single(p.clone())?;
    let psi = StateVector::basis(2, 0);

    let c = commutator(eb.matrix(), p.matrix())?;
    let expected = [[0.0, 0.5], [-0.5, 0.0]];
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, row) in expected.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            let got = c.get(i, j);
            checks.push(Check::close(format!("[E_B, P]_{i}{j} (real)"), Origin::Reference, e, got.re, 1e-15));
            checks.push(Check::close(format!("[E_B, P]_{i}{j} (imag)"), Origin::Reference, 0.0, got.im, 1e-15));
            rows.push(vec![format!("commutator[{i}][{j}]"), fmt_f64(got.re)]);
        }
    }
    let va = valuate(&a, &psi)?;
    let vb = valuate(&b, &psi)?;
    let imp = anchored_implication(&a, &b, &anchor, &psi)?;
    checks.push(Check::holds("v(A) = 1 at e₁", Origin::Reference, va.value, ""));
    checks.push(Check::holds("v(B) = 1 at e₁", Origin::Reference, vb.value, ""));
    checks.push(Check::holds("A ⇒_P B evaluates to 0 at e₁", Origin::Reference, !imp.value, ""));
    checks.push(Check::holds("side condition [E_B, P] = 0 fails", Origin::Reference, !imp.side_condition_held, ""));
    checks.push(Check::refused(
        "classical reduction refused",
        Origin::Identity,
        reduced_implication_projection(&a, &b, &anchor),
    ));
    rows.push(vec!["v(A)".into(), bit(va.value)]);
    rows.push(vec!["v(B)".into(), bit(vb.value)]);
    rows.push(vec!["v(A => B)".into(), bit(imp.value)]);
    rows.push(vec!["side_condition".into(), bit(imp.side_condition_held)]);
    Ok(report("logic-noncommuting-anchor", checks, Table::rows(["quantity", "value"], rows)))
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-like random unitary from Gram–Schmidt on a complex Gaussian matrix;
/// returned as columns.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    cols
}

/// `U diag(d) U*` for a column list `U`.
fn conjugate_diag(u: &[Vec<C64>], d: &[bool]) -> ComplexMatrix {
    let dim = u.len();
    ComplexMatrix::from_fn(dim, |i, j| {
        u.iter().zip(d).filter(|(_, on)| **on).map(|(col, _)| col[i] * col[j].conj()).sum()
    })
}

/// A commuting triple `(E_A, E_B, P)` and a sampler of joint eigenstates.
pub struct CommutingTriple {
    pub dim: usize,
    pub a: Proposition,
    pub b: Proposition,
    pub anchor: Anchor,
    basis: Vec<Vec<C64>>,
    signature: Vec<(bool, bool, bool)>,
}

impl CommutingTriple {
    pub fn random(rng: &mut ChaCha8Rng) -> Result<Self, CliError> {
        let dim = rng.random_range(2..=6usize);
        let basis = random_unitary(dim, rng);
        let mut signature: Vec<(bool, bool, bool)> =
            (0..dim).map(|_| (rng.random(), rng.random(), rng.random())).collect();
        if signature.iter().all(|s| !s.2) {
            let i = rng.random_range(0..dim);
            signature[i].2 = true;
        }
        let pick = |f: fn(&(bool, bool, bool)) -> bool| signature.iter().map(f).collect::<Vec<_>>();
        let a = ProjectionOp::new(conjugate_diag(&basis, &pick(|s| s.0)))?;
        let b = ProjectionOp::new(conjugate_diag(&basis, &pick(|s| s.1)))?;
        let p = ProjectionOp::new(conjugate_diag(&basis, &pick(|s| s.2)))?;
        Ok(Self {
            dim,
            a: Proposition::new("A", a),
            b: Proposition::new("B", b),
            anchor: Anchor::single(p)?,
            basis,
            signature,
        })
    }

    /// Random unit vector in the joint eigenspace of a random basis column.
    pub fn eigenstate(&self, rng: &mut ChaCha8Rng) -> Result<StateVector, CliError> {
        let sig = self.signature[rng.random_range(0..self.dim)];
        let mut v = vec![C64::new(0.0, 0.0); self.dim];
        for (col, s) in self.basis.iter().zip(&self.signature) {
            if *s == sig {
                let c = complex_gaussian(rng);
                for (vi, ci) in v.iter_mut().zip(col) {
                    *vi += c * ci;
                }
            }
        }
        Ok(StateVector::normalized(v)?)
    }
}

pub const REDUCTION_TRIPLES: usize = 500;
pub const REDUCTION_STATES: usize = 100;

fn logic_commuting_reduction(opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rows = Vec::with_capacity(REDUCTION_TRIPLES);
    let mut mismatches = 0usize;
    let mut evaluated = 0usize;
    for i in 0..REDUCTION_TRIPLES {
        let t = CommutingTriple::random(&mut rng)?;
        let reduced = Proposition::new("¬A∨B", reduced_implication_projection(&t.a, &t.b, &t.anchor)?);
        let mut local = 0;
        for _ in 0..REDUCTION_STATES {
            let psi = t.eigenstate(&mut rng)?;
            let anchored = anchored_implication(&t.a, &t.b, &t.anchor, &psi)?;
            if anchored.value != valuate(&reduced, &psi)?.value {
                local += 1;
            }
            evaluated += 1;
        }
        mismatches += local;
        rows.push(vec![
            i.to_string(),
            t.dim.to_string(),
            t.a.projection.rank().to_string(),
            t.b.projection.rank().to_string(),
            t.anchor.generators()[0].rank().to_string(),
            local.to_string(),
        ]);
    }
    let checks = vec![
        Check::close("mismatches between A ⇒_P B and I − E_A + E_A E_B", Origin::Identity, 0.0, mismatches as f64, 0.0),
        Check::close(
            "evaluations",
            Origin::Identity,
            (REDUCTION_TRIPLES * REDUCTION_STATES) as f64,
            evaluated as f64,
            0.0,
        ),
    ];
    let table = Table::rows(["triple", "dim", "rank_a", "rank_b", "rank_p", "mismatches"], rows);
    Ok(report("logic-commuting-reduction", checks, table))
}

fn logic_no_synonym(_: &RunOptions) -> Result<ScenarioReport, CliError> {
    let table = no_synonym_table()?;
    let row = |a: u8, b: u8| -> Option<&NoSynonymRow> { table.rows.iter().find(|r| r.a == a && r.b == b) };
    let mut checks = Vec::new();
    for (a, b) in [(0, 0), (0, 1), (1, 0)] {
        checks.push(Check::holds(
            format!("regimes agree at row {a}{b}"),
            Origin::Reference,
            row(a, b).is_some_and(|r| !r.mismatch),
            "",
        ));
    }
    checks.push(Check::holds("regimes differ at row 11", Origin::Reference, row(1, 1).is_some_and(|r| r.mismatch), ""));
    checks.push(Check::holds(
        "mismatch set is exactly {11}",
        Origin::Reference,
        table.mismatch_rows() == vec![(1, 1)],
        format!("{:?}", table.mismatch_rows()),
    ));
    checks.push(Check::holds(
        "commuting regime equals material implication",
        Origin::Identity,
        table.rows.iter().all(|r| r.commuting == r.classical),
        "",
    ));
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.a.to_string(),
                r.b.to_string(),
                r.noncommuting.to_string(),
                r.commuting.to_string(),
                r.classical.to_string(),
                bit(r.mismatch),
            ]
        })
        .collect();
    let out = Table::rows(["a", "b", "noncommuting", "commuting", "classical", "mismatch"], rows);
    Ok(report("logic-no-synonym", checks, out).with_details(&table))
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<String>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| fmt_f64(m.get(i, j).re)).collect()).collect()
}

fn effects_mini1(_: &RunOptions) -> Result<ScenarioReport, CliError> {
    let a = EffectOp::diag(&[0.6, 0.1])?;
    let b = EffectOp::diag(&[0.7, 0.2])?;
    let anchor = Anchor::single(ProjectionOp::diag(&[1.0, 0.0])?)?;
    let diag10 = ProjectionOp::diag(&[1.0, 0.0])?;
    let states = [
        ("e1", StateVector::basis(2, 0)),
        ("e2", StateVector::basis(2, 1)),
        ("(0.6,0.8)", StateVector::from_real(&[0.6, 0.8])?),
    ];
    let mut checks = Vec::new();
    let mut reduced = None;
    for (label, psi) in &states {
        let r = tau_anchored_implication(&a, &b, &anchor, 0.5, psi)?;
        checks.push(Check::holds(format!("valuation 1 at {label}"), Origin::Reference, r.valuation.value, ""));
        if reduced.is_none() {
            checks.push(Check::holds(
                "P_{A,0.5} = diag(1,0)",
                Origin::Reference,
                r.threshold_a.approx_eq(&diag10, EXACT_TOL),
                "",
            ));
            checks.push(Check::holds(
                "P_{B,0.5} = diag(1,0)",
                Origin::Reference,
                r.threshold_b.approx_eq(&diag10, EXACT_TOL),
                "",
            ));
            reduced = r.reduced;
        }
    }
    let identity = ProjectionOp::identity(2);
    checks.push(Check::holds(
        "reduced projection = I",
        Origin::Reference,
        reduced.as_ref().is_some_and(|p| p.approx_eq(&identity, EXACT_TOL)),
        "",
    ));
    let rows = reduced.as_ref().map(|p| matrix_rows(p.matrix())).unwrap_or_default();
    Ok(report("effects-mini1", checks, Table::rows(["col0", "col1"], rows)))
}

/// `U diag(0.9, 0.1) Uᵀ` with `U = (1/√2)[[1, 1], [−1, 1]]`.
pub fn mini2_effect() -> Result<EffectOp, CliError> {
    let u = ComplexMatrix::from_real_rows(&[vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![-FRAC_1_SQRT_2, FRAC_1_SQRT_2]])?;
    let m = &(&u * &ComplexMatrix::diag(&[0.9, 0.1])) * &u.adjoint();
    Ok(EffectOp::new(m.hermitian_part())?)
}

fn effects_mini2(_: &RunOptions) -> Result<ScenarioReport, CliError> {
    let a = EffectOp::diag(&[1.0, 0.0])?;
    let b = mini2_effect()?;
    let p = ProjectionOp::diag(&[1.0, 0.0])?;
    let anchor = Anchor::single(p.clone())?;
    let tau = 0.8;

    let pb = spectral_threshold_projection(&b, tau)?.projection;
    let pa = spectral_threshold_projection(&a, tau)?.projection;
    let expected = [[0.5, -0.5], [-0.5, 0.5]];
    let mut checks = Vec::new();
    for (i, row) in expected.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            let got = pb.matrix().get(i, j);
            checks.push(Check::close(format!("P_(B,0.8)[{i}][{j}]"), Origin::Reference, e, got.re, 1e-9));
            checks.push(Check::close(format!("P_(B,0.8)[{i}][{j}] (imag)"), Origin::Reference, 0.0, got.im, 1e-9));
        }
    }
    checks.push(Check::holds("P_(A,0.8) = diag(1,0)", Origin::Reference, pa.approx_eq(&p, EXACT_TOL), ""));
    let comm = commutator(b.matrix(), p.matrix())?.frobenius_norm();
    checks.push(Check::holds("[B, P] ≠ 0", Origin::Reference, comm > 1e-6, format!("‖[B, P]‖_F = {comm:e}")));
    let meet = subspace_meet(&pa, &pb)?;
    checks.push(Check::holds(
        "no state lies in both threshold ranges",
        Origin::Oracle,
        meet.is_zero(),
        "the example is evaluated at e₁, where only the antecedent range holds",
    ));

    let e1 = StateVector::basis(2, 0);
    let r = tau_anchored_implication(&a, &b, &anchor, tau, &e1)?;
    checks.push(Check::holds("valuation 0 at e₁", Origin::Reference, !r.valuation.value, ""));
    checks.push(Check::holds("side condition fails", Origin::Reference, !r.valuation.side_condition_held, ""));
    checks.push(Check::holds("no reduced projection is offered", Origin::Identity, r.reduced.is_none(), ""));
    let anti = StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])?;
    let r2 = tau_anchored_implication(&a, &b, &anchor, tau, &anti)?;
    checks.push(Check::holds(
        "vacuous at (1,−1)/√2 (antecedent false)",
        Origin::Identity,
        r2.valuation.value && r2.valuation.vacuous,
        "",
    ));
    let rows = matrix_rows(pb.matrix());
    Ok(report("effects-mini2", checks, Table::rows(["col0", "col1"], rows)))
}

/// Shared by the config path: `JsonScalar` list to a state vector.
pub fn state_from_json(entries: &[JsonScalar]) -> Result<StateVector, CliError> {
    Ok(StateVector::new(entries.iter().map(|&s| C64::from(s)).collect())?)
}
