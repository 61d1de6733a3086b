//! Event-indexed iteration: orbits of switching operator sequences,
//! block certificates, envelopes and rate checks.
//!
//! A schedule's factors are claims. [`block_certify`] turns the operators
//! of each block into a certificate, and [`envelope_check`] validates an
//! observed orbit. A passing envelope check says nothing about whether the
//! claim was earned.

mod certify;
mod envelope;
mod schedule;

pub use certify::{
    anchored_run, block_certify, certify_block, classical_rate_check, power_contraction_index, uniqueness_witness,
    AnchoredReport, BlockCertificate, PowerIndex, RateReport, UniquenessReport,
};
pub use envelope::{check_distances, envelope_check, envelope_value, EnvelopeReport, EnvelopeSpec};
pub use schedule::{Block, Event, EventSchedule};

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::distance;
use crate::operators::{OperatorMap, FIXED_POINT_TOL};

/// Default absolute tolerance for inequality checks on distances of order 1.
pub const CHECK_TOL: f64 = 1e-9;
pub const MAX_ORBIT_LEN: usize = 1_000_000;
/// Distances below this are recorded as zero.
pub const DIST_FLOOR: f64 = 1e-300;

/// Per-step operator source: `T_t` for `t = 1, 2, …`.
#[derive(Clone, Debug)]
pub struct OperatorSequence {
    ops: Vec<OperatorMap>,
    cyclic: bool,
}

impl OperatorSequence {
    /// `ops` repeated forever: `T_t = ops[(t − 1) mod len]`.
    pub fn cyclic(ops: Vec<OperatorMap>) -> Result<Self> {
        Self::build(ops, true)
    }

    /// Exactly `ops.len()` steps.
    pub fn finite(ops: Vec<OperatorMap>) -> Result<Self> {
        Self::build(ops, false)
    }

    fn build(ops: Vec<OperatorMap>, cyclic: bool) -> Result<Self> {
        let dim = ops
            .first()
            .map(OperatorMap::dim)
            .ok_or_else(|| Error::InvalidOperator("empty operator sequence".into()))?;
        if let Some(op) = ops.iter().find(|op| op.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
        }
        Ok(Self { ops, cyclic })
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    /// Number of steps available, `None` when cyclic.
    pub fn len(&self) -> Option<usize> {
        (!self.cyclic).then_some(self.ops.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `T_t`, one-based.
    pub fn at(&self, t: usize) -> Option<&OperatorMap> {
        if t == 0 {
            return None;
        }
        if self.cyclic {
            Some(&self.ops[(t - 1) % self.ops.len()])
        } else {
            self.ops.get(t - 1)
        }
    }

    /// The stored operators (one period when cyclic).
    pub fn operators(&self) -> &[OperatorMap] {
        &self.ops
    }

    /// Operators used by steps `1..=n_max`, with their first step index.
    fn used_until(&self, n_max: usize) -> impl Iterator<Item = (usize, &OperatorMap)> {
        self.ops.iter().enumerate().take(n_max).map(|(i, op)| (i + 1, op))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointPolicy {
    /// Refuse to run unless `z` is fixed by every operator used.
    Verify,
    /// Skip the check (counterexamples, Fejér experiments).
    Waive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitStep {
    pub n: usize,
    pub x: Vec<f64>,
    pub dist: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceMetadata {
    pub tolerance: f64,
    pub fixed_point_policy: FixedPointPolicy,
    pub operators: Vec<String>,
    pub cyclic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitTrace {
    pub steps: Vec<OrbitStep>,
    pub z: Vec<f64>,
    pub schedule: Option<EventSchedule>,
    pub metadata: TraceMetadata,
}

impl OrbitTrace {
    pub fn distances(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.dist).collect()
    }

    pub fn dist(&self, n: usize) -> Option<f64> {
        self.steps.get(n).map(|s| s.dist)
    }

    pub fn with_schedule(mut self, schedule: EventSchedule) -> Self {
        self.schedule = Some(schedule);
        self
    }

    /// First `n` with `dist(n) > dist(n − 1) + tol`.
    pub fn first_increase(&self, tol: f64) -> Option<usize> {
        self.steps.windows(2).find(|w| w[1].dist > w[0].dist + tol).map(|w| w[1].n)
    }

    /// First `(n, i)` where the distance to `points[i]` grows by more than `tol`.
    /// `None` means the orbit is Fejér monotone with respect to the points.
    pub fn fejer_violation(&self, points: &[Vec<f64>], tol: f64) -> Option<(usize, usize)> {
        for (i, p) in points.iter().enumerate() {
            let mut prev = f64::INFINITY;
            for s in &self.steps {
                let d = distance(&s.x, p);
                if d > prev + tol {
                    return Some((s.n, i));
                }
                prev = d;
            }
        }
        None
    }
}

fn clamp_dist(d: f64) -> f64 {
    if d < DIST_FLOOR {
        0.0
    } else {
        d
    }
}

/// `x_n = T_n ⋯ T_1 x_0` for `n = 0..=n_max`, with `‖x_n − z‖` recorded.
pub fn run_orbit(
    sequence: &OperatorSequence,
    x0: &[f64],
    z: &[f64],
    n_max: usize,
    policy: FixedPointPolicy,
) -> Result<OrbitTrace> {
    let dim = sequence.dim();
    for v in [x0, z] {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
    }
    if n_max > MAX_ORBIT_LEN {
        return Err(Error::OutOfRange { name: "n_max", value: n_max as f64 });
    }
    if let Some(len) = sequence.len() {
        if len < n_max {
            return Err(Error::InvalidSchedule(format!("sequence has {len} steps, {n_max} requested")));
        }
    }
    if policy == FixedPointPolicy::Verify {
        for (step, op) in sequence.used_until(n_max) {
            let residual = op.fixed_point_residual(z)?;
            if residual > FIXED_POINT_TOL {
                return Err(Error::UnverifiedFixedPoint { step, residual });
            }
        }
    }

    let mut steps = Vec::with_capacity(n_max + 1);
    let mut x = x0.to_vec();
    steps.push(OrbitStep { n: 0, dist: clamp_dist(distance(&x, z)), x: x.clone() });
    for n in 1..=n_max {
        x = sequence.at(n).expect("length checked above").apply(&x)?;
        steps.push(OrbitStep { n, dist: clamp_dist(distance(&x, z)), x: x.clone() });
    }
    Ok(OrbitTrace {
        steps,
        z: z.to_vec(),
        schedule: None,
        metadata: TraceMetadata {
            tolerance: CHECK_TOL,
            fixed_point_policy: policy,
            operators: sequence.operators().iter().map(OperatorMap::describe).collect(),
            cyclic: sequence.is_cyclic(),
            seed: None,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeBounds {
    pub blocks: usize,
    /// `Σ ln λ_j / Σ N_j` over the prefix.
    pub prefix_slope: f64,
    /// `(1/M) · (1/K) Σ ln λ_j` when every `N_j ≤ M` is declared.
    pub gap_bounded_slope: Option<f64>,
}

/// Finite-prefix surrogates for the asymptotic log-slope bounds.
pub fn slope_bounds(schedule: &EventSchedule, blocks: usize) -> Result<SlopeBounds> {
    if blocks == 0 {
        return Err(Error::InvalidSchedule("empty prefix".into()));
    }
    schedule.validate()?;
    let prefix = schedule.blocks(blocks)?;
    let log_sum: f64 = prefix.iter().map(|b| b.lambda.ln()).sum();
    let steps: usize = prefix.iter().map(|b| b.len).sum();
    let gap_bounded_slope = schedule
        .gap_bound()
        .filter(|m| prefix.iter().all(|b| b.len <= *m))
        .map(|m| log_sum / (m as f64 * blocks as f64));
    Ok(SlopeBounds { blocks, prefix_slope: log_sum / steps as f64, gap_bounded_slope })
}

#[derive(Clone, Debug, PartialEq)]
pub enum TightnessVariant {
    /// Period `gap`: `gap − 1` quarter turns then `λ I`.
    Periodic { lambda: f64, gap: usize },
    /// Each block: `N_k − 1` quarter turns then `λ_k I`.
    HeterogeneousExact { blocks: Vec<Block> },
}

#[derive(Clone, Debug)]
pub struct TightnessScenario {
    pub sequence: OperatorSequence,
    pub schedule: EventSchedule,
    pub envelope: EnvelopeSpec,
    /// Natural orbit length: eight periods, or the whole block list.
    pub n_max: usize,
}

/// Sequences in `R²` whose orbits meet the envelope with equality.
pub fn tightness_schedule(variant: &TightnessVariant) -> Result<TightnessScenario> {
    let turn = || OperatorMap::rotation(FRAC_PI_2);
    match variant {
        TightnessVariant::Periodic { lambda, gap } => {
            let schedule = EventSchedule::periodic(*lambda, *gap, *gap)?;
            let mut ops: Vec<_> = (1..*gap).map(|_| turn()).collect();
            ops.push(OperatorMap::scaling(2, *lambda));
            Ok(TightnessScenario {
                sequence: OperatorSequence::cyclic(ops)?,
                envelope: EnvelopeSpec::from_schedule(&schedule, 0),
                schedule,
                n_max: 8 * gap,
            })
        }
        TightnessVariant::HeterogeneousExact { blocks } => {
            let schedule = EventSchedule::heterogeneous(blocks.clone())?;
            let mut ops = Vec::new();
            for b in blocks {
                ops.extend((1..b.len).map(|_| turn()));
                ops.push(OperatorMap::scaling(2, b.lambda));
            }
            let n_max = ops.len();
            Ok(TightnessScenario {
                sequence: OperatorSequence::finite(ops)?,
                envelope: EnvelopeSpec::from_schedule(&schedule, n_max),
                schedule,
                n_max,
            })
        }
    }
}
