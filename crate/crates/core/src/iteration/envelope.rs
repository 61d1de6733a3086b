//! Certified decay envelopes and their comparison against orbits.
//!
//! Envelope values multiply the distance at the start of the orbit
//! (`n_0 = 0`): after `k` events the bound is `λ_1 ⋯ λ_k · ‖x_0 − z‖`.

use serde::{Deserialize, Serialize};

use super::schedule::EventSchedule;
use super::OrbitTrace;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum EnvelopeSpec {
    /// `λ^{1 + ⌊(n − n_1)/M⌋}`
    PeriodicFloor { lambda: f64, gap: usize, first_event: usize },
    /// `∏_{j ≤ k(n)} λ_j` with `k(n) = max{k : n_k ≤ n}`.
    HeterogeneousProduct { events: Vec<usize>, factors: Vec<f64> },
}

impl EnvelopeSpec {
    /// Envelope matching a schedule; finite variants are truncated at `n_max`.
    pub fn from_schedule(schedule: &EventSchedule, n_max: usize) -> Self {
        match schedule {
            EventSchedule::Periodic { lambda, gap, first_event } => {
                Self::PeriodicFloor { lambda: *lambda, gap: *gap, first_event: *first_event }
            }
            _ => {
                let events = schedule.events_until(n_max);
                Self::HeterogeneousProduct {
                    events: events.iter().map(|e| e.end).collect(),
                    factors: events.iter().map(|e| e.factor).collect(),
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PeriodicFloor { lambda, gap, first_event } => {
                EventSchedule::periodic(*lambda, *gap, *first_event).map(|_| ())
            }
            Self::HeterogeneousProduct { events, factors } => {
                EventSchedule::Explicit { events: events.clone(), factors: factors.clone() }.validate()
            }
        }
    }

    pub fn first_event(&self) -> usize {
        match self {
            Self::PeriodicFloor { first_event, .. } => *first_event,
            Self::HeterogeneousProduct { events, .. } => events.first().copied().unwrap_or(usize::MAX),
        }
    }

    pub fn is_event(&self, n: usize) -> bool {
        match self {
            Self::PeriodicFloor { gap, first_event, .. } => n >= *first_event && (n - first_event).is_multiple_of(*gap),
            Self::HeterogeneousProduct { events, .. } => events.binary_search(&n).is_ok(),
        }
    }

    /// Log-slope between events, `ln λ / M`, for the periodic variant.
    pub fn log_slope(&self) -> Option<f64> {
        match self {
            Self::PeriodicFloor { lambda, gap, .. } => Some(lambda.ln() / *gap as f64),
            Self::HeterogeneousProduct { .. } => None,
        }
    }
}

pub fn envelope_value(spec: &EnvelopeSpec, n: usize) -> Result<f64> {
    let first = spec.first_event();
    if n < first {
        return Err(Error::BeforeFirstEvent { n, first });
    }
    Ok(match spec {
        EnvelopeSpec::PeriodicFloor { lambda, gap, first_event } => {
            let exponent = 1 + (n - first_event) / gap;
            lambda.powi(i32::try_from(exponent).unwrap_or(i32::MAX))
        }
        EnvelopeSpec::HeterogeneousProduct { events, factors } => {
            let k = events.partition_point(|&e| e <= n);
            factors[..k].iter().product()
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub certified: bool,
    pub first_violation: Option<usize>,
    /// `‖x_0 − z‖`, the distance the envelope multiplies.
    pub reference_distance: f64,
    /// Largest `bound − dist` over checked indices.
    pub max_slack: f64,
    /// Smallest `bound − dist`; negative means a violation.
    pub min_slack: f64,
    /// Indices where `dist = bound` within tolerance.
    pub tight_indices: Vec<usize>,
    pub checked: usize,
    pub tolerance: f64,
}

impl EnvelopeReport {
    pub fn tight_everywhere(&self) -> bool {
        self.checked > 0 && self.tight_indices.len() == self.checked
    }
}

/// Checks `dist(n) ≤ E(n) · dist(0) + tol` for every `n ≥ n_1`, where
/// `distances[n]` is the distance at step `n`.
pub fn check_distances(distances: &[f64], spec: &EnvelopeSpec, tol: f64) -> Result<EnvelopeReport> {
    spec.validate()?;
    let reference = *distances.first().ok_or_else(|| Error::InvalidSchedule("empty trace".into()))?;
    let mut report = EnvelopeReport {
        certified: true,
        first_violation: None,
        reference_distance: reference,
        max_slack: f64::NEG_INFINITY,
        min_slack: f64::INFINITY,
        tight_indices: Vec::new(),
        checked: 0,
        tolerance: tol,
    };
    for (n, &d) in distances.iter().enumerate().skip(spec.first_event()) {
        let bound = envelope_value(spec, n)? * reference;
        let slack = bound - d;
        report.max_slack = report.max_slack.max(slack);
        report.min_slack = report.min_slack.min(slack);
        report.checked += 1;
        if slack.abs() <= tol {
            report.tight_indices.push(n);
        }
        if slack < -tol && report.first_violation.is_none() {
            report.certified = false;
            report.first_violation = Some(n);
        }
    }
    Ok(report)
}

pub fn envelope_check(trace: &OrbitTrace, spec: &EnvelopeSpec, tol: f64) -> Result<EnvelopeReport> {
    check_distances(&trace.distances(), spec, tol)
}
