use serde::Serialize;

use super::schedule::EventSchedule;
use super::{OperatorSequence, CHECK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{distance, hermitian_eigendecomposition, ProjectionOp, RealMatrix};
use crate::operators::{lipschitz_certified, OperatorMap, FIXED_POINT_TOL};

/// Slack allowed when comparing a certificate with a claimed factor.
pub const CERTIFICATE_TOL: f64 = 1e-12;
/// Singular values of `I − L` below this count toward `dim Fix(T)`.
const KERNEL_TOL: f64 = 1e-8;
const ITERATED_FIXED_POINT_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockCertificate {
    /// One-based block number; `0` for an unscheduled block.
    pub index: usize,
    pub start: usize,
    pub end: usize,
    /// Product of the per-operator certificates.
    pub factor_product: f64,
    /// Spectral norm of the composed linear part, when every factor is affine.
    pub exact: Option<f64>,
    /// `min(factor_product, exact)`
    pub certificate: f64,
    pub claimed: Option<f64>,
}

/// Certified Lipschitz constant of `T_k ∘ ⋯ ∘ T_1` for `ops = [T_1, …, T_k]`.
pub fn certify_block(ops: &[OperatorMap]) -> Result<BlockCertificate> {
    if ops.is_empty() {
        return Err(Error::InvalidSchedule("empty block".into()));
    }
    let factor_product: f64 = ops.iter().map(lipschitz_certified).product();
    let composed = OperatorMap::compose(ops.to_vec())?;
    let exact = composed.as_affine().map(|(l, _)| l.spectral_norm());
    let certificate = exact.map_or(factor_product, |e| e.min(factor_product));
    Ok(BlockCertificate { index: 0, start: 1, end: ops.len(), factor_product, exact, certificate, claimed: None })
}

/// Certificates for every block closing at or before `n_max`, checked
/// against the schedule's claimed factors.
pub fn block_certify(
    sequence: &OperatorSequence,
    schedule: &EventSchedule,
    n_max: usize,
) -> Result<Vec<BlockCertificate>> {
    schedule.validate()?;
    let events = schedule.events_until(n_max);
    let mut out = Vec::with_capacity(events.len());
    for ev in events {
        let ops = (ev.start..=ev.end)
            .map(|t| {
                sequence.at(t).cloned().ok_or_else(|| {
                    Error::InvalidSchedule(format!("block {} ends at {} past the sequence", ev.k, ev.end))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cert = certify_block(&ops)?;
        cert.index = ev.k;
        cert.start = ev.start;
        cert.end = ev.end;
        cert.claimed = Some(ev.factor);
        if cert.certificate > ev.factor + CERTIFICATE_TOL {
            return Err(Error::BlockNotCertified { block: ev.k, certificate: cert.certificate, claimed: ev.factor });
        }
        out.push(cert);
    }
    Ok(out)
}

/// Certified `Lip(T^n)`: exact for affine maps, `Lip(T)^n` otherwise.
fn power_certificate(op: &OperatorMap, affine: Option<&RealMatrix>, n: usize) -> Result<f64> {
    let bound = lipschitz_certified(op).powi(i32::try_from(n).unwrap_or(i32::MAX));
    Ok(match affine {
        Some(l) => l.powi(n)?.spectral_norm().min(bound),
        None => bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PowerIndex {
    Found {
        n: usize,
        certificate: f64,
        /// `(p, Lip(T^p))` for sampled `p > n`.
        later: Vec<(usize, f64)>,
    },
    Absent {
        best: f64,
        best_n: usize,
    },
}

impl PowerIndex {
    pub fn index(&self) -> Option<usize> {
        match self {
            Self::Found { n, .. } => Some(*n),
            Self::Absent { .. } => None,
        }
    }
}

/// Smallest `N ≤ n_max` with certified `Lip(T^N) ≤ target`.
pub fn power_contraction_index(op: &OperatorMap, target: f64, n_max: usize) -> Result<PowerIndex> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::OutOfRange { name: "lambda_target", value: target });
    }
    let linear = op.as_affine().map(|(l, _)| l);
    let base = power_certificate(op, linear.as_ref(), 1)?;
    if base > 1.0 + CERTIFICATE_TOL {
        return Err(Error::HypothesisViolated(format!("operator is not nonexpansive (certificate {base})")));
    }

    let mut best = (f64::INFINITY, 0);
    let mut power = linear.clone();
    for n in 1..=n_max {
        let cert = match &power {
            Some(p) => p.spectral_norm().min(lipschitz_certified(op).powi(n as i32)),
            None => lipschitz_certified(op).powi(i32::try_from(n).unwrap_or(i32::MAX)),
        };
        if cert < best.0 {
            best = (cert, n);
        }
        if cert <= target + CERTIFICATE_TOL {
            let later = [n + 1, n + 2, 2 * n, 3 * n + 1, 10 * n]
                .into_iter()
                .filter(|p| *p > n)
                .map(|p| power_certificate(op, linear.as_ref(), p).map(|c| (p, c)))
                .collect::<Result<Vec<_>>>()?;
            if let Some((p, c)) = later.iter().find(|(_, c)| *c > target + CERTIFICATE_TOL) {
                return Err(Error::HypothesisViolated(format!("Lip(T^{p}) = {c} exceeds the target after N = {n}")));
            }
            return Ok(PowerIndex::Found { n, certificate: cert, later });
        }
        if let (Some(p), Some(l)) = (&mut power, &linear) {
            *p = l.mul(p)?;
        }
    }
    Ok(PowerIndex::Absent { best: best.0, best_n: best.1 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub n_power: usize,
    pub lambda: f64,
    /// Certified `Lip(T^N)`.
    pub certificate: f64,
    pub fixed_point: Vec<f64>,
    /// `‖T z − z‖`
    pub inherited_residual: f64,
    pub distances: Vec<f64>,
    /// Number of indices `n ∈ [N, n_max]` checked.
    pub checked: usize,
    /// Largest `|rhs − lhs|` over checked indices.
    pub max_gap: f64,
    /// `lhs = rhs` to `1e−12` relative at every checked index.
    pub equality: bool,
}

fn orbit_distances(op: &OperatorMap, x0: &[f64], z: &[f64], n_max: usize) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(distance(&x, z));
    for _ in 0..n_max {
        x = op.apply(&x)?;
        out.push(distance(&x, z));
    }
    Ok(out)
}

/// Verifies `dist(n) ≤ λ^{n−N+1} dist(N−1)` for `N ≤ n ≤ n_max`.
fn verify_rate(distances: &[f64], n_power: usize, lambda: f64) -> Result<(usize, f64, bool)> {
    let reference = distances[n_power - 1];
    let mut max_gap: f64 = 0.0;
    let mut equality = true;
    for (n, &lhs) in distances.iter().enumerate().skip(n_power) {
        let rhs = lambda.powi(i32::try_from(n + 1 - n_power).unwrap_or(i32::MAX)) * reference;
        if lhs > rhs + CHECK_TOL {
            return Err(Error::RateViolation { n, lhs, rhs });
        }
        let gap = (rhs - lhs).abs();
        max_gap = max_gap.max(gap);
        equality &= gap <= 1e-12 * rhs.max(1.0);
    }
    Ok((distances.len().saturating_sub(n_power), max_gap, equality))
}

fn check_power_args(n_power: usize, lambda: f64, n_max: usize) -> Result<()> {
    if n_power == 0 {
        return Err(Error::OutOfRange { name: "N", value: 0.0 });
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::OutOfRange { name: "lambda", value: lambda });
    }
    if n_max < n_power || n_max > super::MAX_ORBIT_LEN {
        return Err(Error::OutOfRange { name: "n_max", value: n_max as f64 });
    }
    Ok(())
}

/// Checks the single-map rate `‖T^n x − z‖ ≤ λ^{n−N+1} ‖T^{N−1} x − z‖`
/// once `Lip(T^N) ≤ λ` is certified.
pub fn classical_rate_check(
    op: &OperatorMap,
    n_power: usize,
    lambda: f64,
    x0: &[f64],
    z: Option<&[f64]>,
    n_max: usize,
) -> Result<RateReport> {
    check_power_args(n_power, lambda, n_max)?;
    if x0.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: x0.len() });
    }
    let affine = op.as_affine();
    let certificate = power_certificate(op, affine.as_ref().map(|(l, _)| l), n_power)?;
    if certificate > lambda + CERTIFICATE_TOL {
        return Err(Error::NotContractive { certificate, target: lambda });
    }

    let fixed_point = match (z, &affine) {
        (Some(z), _) => z.to_vec(),
        (None, Some((l, b))) => RealMatrix::identity(op.dim()).sub(l)?.solve(b)?,
        (None, None) => iterate_to_fixed_point(&op.power(n_power)?, x0)?,
    };
    let inherited_residual = op.fixed_point_residual(&fixed_point)?;
    if inherited_residual > FIXED_POINT_TOL {
        return Err(Error::CandidateNotFixed { which: "z", member: 1, residual: inherited_residual });
    }

    let distances = orbit_distances(op, x0, &fixed_point, n_max)?;
    let (checked, max_gap, equality) = verify_rate(&distances, n_power, lambda)?;
    Ok(RateReport {
        n_power,
        lambda,
        certificate,
        fixed_point,
        inherited_residual,
        distances,
        checked,
        max_gap,
        equality,
    })
}

/// Picard iteration of a certified contraction.
fn iterate_to_fixed_point(op: &OperatorMap, x0: &[f64]) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    let mut step = f64::INFINITY;
    for _ in 0..super::MAX_ORBIT_LEN {
        let y = op.apply(&x)?;
        step = distance(&x, &y);
        x = y;
        if step <= ITERATED_FIXED_POINT_TOL {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence { sweeps: super::MAX_ORBIT_LEN, residual: step })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnchoredReport {
    /// `max(‖LP − PL‖, ‖b − Pb‖)`
    pub commutator_residual: f64,
    pub anchor_rank: usize,
    /// Spectral norm of the `N`-th power of `T` compressed to `ran P`.
    pub certificate: f64,
    /// The unique fixed point of `T` on `ran P`.
    pub fixed_point: Vec<f64>,
    /// `‖T^n (P x_0) − z‖`
    pub distances: Vec<f64>,
    pub checked: usize,
    pub max_gap: f64,
    pub equality: bool,
    /// `dim ker(I − L)` on the whole space.
    pub global_fixed_dim: usize,
}

/// Rate check for an affine `T` restricted to the range of a commuting
/// projection `P`.
pub fn anchored_run(
    op: &OperatorMap,
    anchor: &ProjectionOp,
    x0: &[f64],
    n_power: usize,
    lambda: f64,
    n_max: usize,
) -> Result<AnchoredReport> {
    check_power_args(n_power, lambda, n_max)?;
    let dim = op.dim();
    for found in [anchor.dim(), x0.len()] {
        if found != dim {
            return Err(Error::DimensionMismatch { expected: dim, found });
        }
    }
    let (l, b) = op.as_affine().ok_or_else(|| Error::InvalidOperator(format!("{} is not affine", op.describe())))?;
    if anchor.matrix().max_imag() > anchor.tol() {
        return Err(Error::HypothesisViolated("anchor projection must be real".into()));
    }
    let p = anchor.matrix().real_part();

    let comm = l.mul(&p)?.sub(&p.mul(&l)?)?.spectral_norm();
    let offset_gap = distance(&b, &p.mul_vec(&b)?);
    let commutator_residual = comm.max(offset_gap);
    if commutator_residual > CHECK_TOL {
        return Err(Error::CommutationRequired { what: "[T, P]".into(), residual: commutator_residual });
    }

    let basis = anchor.range_basis();
    let rank = basis.len();
    if rank == 0 {
        return Err(Error::HypothesisViolated("anchor projection is zero".into()));
    }
    let mut q = RealMatrix::zeros(dim, rank);
    for (j, v) in basis.iter().enumerate() {
        for (i, c) in v.iter().enumerate() {
            q.set(i, j, c.re);
        }
    }
    let qt = q.transpose();
    let l_c = qt.mul(&l)?.mul(&q)?;
    let b_c = qt.mul_vec(&b)?;
    let certificate = l_c.powi(n_power)?.spectral_norm();
    if certificate > lambda + CERTIFICATE_TOL {
        return Err(Error::NotContractive { certificate, target: lambda });
    }
    let z_c = RealMatrix::identity(rank).sub(&l_c)?.solve(&b_c)?;
    let fixed_point = q.mul_vec(&z_c)?;

    let px0 = p.mul_vec(x0)?;
    let distances = orbit_distances(op, &px0, &fixed_point, n_max)?;
    let (checked, max_gap, equality) = verify_rate(&distances, n_power, lambda)?;

    let i_minus_l = RealMatrix::identity(dim).sub(&l)?;
    let gram = i_minus_l.transpose().mul(&i_minus_l)?.to_complex()?;
    let global_fixed_dim =
        hermitian_eigendecomposition(&gram)?.iter().filter(|e| e.value.max(0.0).sqrt() <= KERNEL_TOL).count();

    Ok(AnchoredReport {
        commutator_residual,
        anchor_rank: rank,
        certificate,
        fixed_point,
        distances,
        checked,
        max_gap,
        equality,
        global_fixed_dim,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UniquenessReport {
    Coincide {
        factor: f64,
    },
    /// Two common fixed points at positive distance under a block the
    /// certificates call contractive: some certificate is wrong.
    Inconsistent {
        distance: f64,
        factor: f64,
    },
}

/// Two common fixed points of a family with a contractive block coincide.
pub fn uniqueness_witness(
    sequence: &OperatorSequence,
    schedule: &EventSchedule,
    w: &[f64],
    z: &[f64],
) -> Result<UniquenessReport> {
    for (member, op) in sequence.operators().iter().enumerate() {
        for (which, point) in [("w", w), ("z", z)] {
            let residual = op.fixed_point_residual(point)?;
            if residual > FIXED_POINT_TOL {
                return Err(Error::CandidateNotFixed { which, member: member + 1, residual });
            }
        }
    }
    let first = block_certify(sequence, schedule, schedule.first_event())?;
    let factor = first[0].certificate;
    if factor >= 1.0 {
        return Err(Error::NotContractive { certificate: factor, target: 1.0 });
    }
    let gap = distance(w, z);
    Ok(if gap <= CHECK_TOL {
        UniquenessReport::Coincide { factor }
    } else {
        UniquenessReport::Inconsistent { distance: gap, factor }
    })
}
