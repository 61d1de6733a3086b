//! Symbolic nonexpansive maps on `R^n`.
//!
//! Every operator is described by a kind and its parameters, never by an
//! opaque closure (the black-box kind excepted), so Lipschitz certificates
//! can be read off the description.

mod convex;
mod descriptor;

pub use convex::ConvexSet;
pub use descriptor::{OperatorDescriptor, OperatorSpec, DESCRIPTOR_VERSION};

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, distance, norm, RealMatrix};

/// Residual target for alternating projections in [`common_fixed_point`].
pub const ALTERNATING_RESIDUAL: f64 = 1e-12;
pub const ALTERNATING_MAX_ITER: usize = 1_000_000;
/// `‖T z − z‖` accepted for a verified fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 42;
pub const SAMPLE_RADIUS: f64 = 10.0;

pub type BlackBoxFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// What is known about `Fix(T)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointInfo {
    /// A known fixed point (unique minimizer, common zero, affine solve, ...).
    Point(Vec<f64>),
    /// `Fix(T)` contains (for projections: equals) this convex set.
    Set(ConvexSet),
}

#[derive(Clone)]
pub enum OperatorKind {
    /// `x ↦ L x + b`
    Affine {
        linear: RealMatrix,
        offset: Vec<f64>,
    },
    /// Planar rotation by `angle` radians.
    Rotation {
        angle: f64,
    },
    /// `x ↦ α x`
    Scaling {
        factor: f64,
    },
    /// Metric projection onto a closed convex set.
    Projection(ConvexSet),
    /// Soft thresholding, the prox of `γ‖·‖₁`.
    ProxL1 {
        gamma: f64,
    },
    /// `(I + γA)⁻¹` for linear positive-semidefinite `A`.
    Resolvent {
        monotone: RealMatrix,
        gamma: f64,
        shifted: RealMatrix,
    },
    /// `(1 − α) I + α S`
    Averaged {
        alpha: f64,
        inner: Box<OperatorMap>,
    },
    Composition(CompositionOp),
    /// Opaque map. Certified modulus is `∞` unless a bound is asserted.
    BlackBox {
        name: String,
        map: BlackBoxFn,
        asserted_lipschitz: Option<f64>,
    },
}

impl fmt::Debug for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Affine { linear, offset } => {
                f.debug_struct("Affine").field("linear", linear).field("offset", offset).finish()
            }
            Self::Rotation { angle } => f.debug_struct("Rotation").field("angle", angle).finish(),
            Self::Scaling { factor } => f.debug_struct("Scaling").field("factor", factor).finish(),
            Self::Projection(c) => f.debug_tuple("Projection").field(c).finish(),
            Self::ProxL1 { gamma } => f.debug_struct("ProxL1").field("gamma", gamma).finish(),
            Self::Resolvent { monotone, gamma, .. } => {
                f.debug_struct("Resolvent").field("monotone", monotone).field("gamma", gamma).finish()
            }
            Self::Averaged { alpha, inner } => {
                f.debug_struct("Averaged").field("alpha", alpha).field("inner", inner).finish()
            }
            Self::Composition(c) => f.debug_tuple("Composition").field(c).finish(),
            Self::BlackBox { name, asserted_lipschitz, .. } => {
                f.debug_struct("BlackBox").field("name", name).field("asserted_lipschitz", asserted_lipschitz).finish()
            }
        }
    }
}

/// Ordered product `T_k ∘ … ∘ T_1`; `factors[0]` is applied first.
#[derive(Clone, Debug)]
pub struct CompositionOp {
    factors: Vec<OperatorMap>,
}

impl CompositionOp {
    pub fn factors(&self) -> &[OperatorMap] {
        &self.factors
    }

    /// Product of the factor certificates.
    pub fn certified_lipschitz(&self) -> f64 {
        self.factors.iter().map(lipschitz_certified).product()
    }
}

#[derive(Clone, Debug)]
pub struct OperatorMap {
    dim: usize,
    kind: OperatorKind,
    fixed_points: Option<FixedPointInfo>,
}

fn quarter_turn_cos_sin(angle: f64) -> (f64, f64) {
    let q = angle / FRAC_PI_2;
    let r = q.round();
    if (q - r).abs() < 1e-12 && r.abs() < 1e15 {
        match (r as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (angle.cos(), angle.sin())
    }
}

fn check_len(dim: usize, len: usize) -> Result<()> {
    if dim != len {
        return Err(Error::DimensionMismatch { expected: dim, found: len });
    }
    Ok(())
}

impl OperatorMap {
    fn with_kind(dim: usize, kind: OperatorKind) -> Self {
        let mut op = Self { dim, kind, fixed_points: None };
        op.fixed_points = op.derive_fixed_points();
        op
    }

    pub fn affine(linear: RealMatrix, offset: Vec<f64>) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::InvalidOperator("affine map needs a square linear part".into()));
        }
        check_len(linear.nrows(), offset.len())?;
        Ok(Self::with_kind(linear.nrows(), OperatorKind::Affine { linear, offset }))
    }

    pub fn linear(linear: RealMatrix) -> Result<Self> {
        let n = linear.nrows();
        Self::affine(linear, vec![0.0; n])
    }

    /// Rotation of the plane; multiples of `π/2` use exact cosines.
    pub fn rotation(angle: f64) -> Self {
        Self::with_kind(2, OperatorKind::Rotation { angle })
    }

    pub fn quarter_turn() -> Self {
        Self::rotation(FRAC_PI_2)
    }

    pub fn scaling(dim: usize, factor: f64) -> Self {
        Self::with_kind(dim, OperatorKind::Scaling { factor })
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaling(dim, 1.0)
    }

    pub fn projection(set: ConvexSet) -> Result<Self> {
        set.validate()?;
        Ok(Self::with_kind(set.dim(), OperatorKind::Projection(set)))
    }

    pub fn prox_l1(dim: usize, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::OutOfRange { name: "gamma", value: gamma });
        }
        Ok(Self::with_kind(dim, OperatorKind::ProxL1 { gamma }))
    }

    pub fn resolvent(monotone: RealMatrix, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::OutOfRange { name: "gamma", value: gamma });
        }
        if !monotone.is_square() {
            return Err(Error::InvalidOperator("monotone operator must be square".into()));
        }
        let n = monotone.nrows();
        let c = monotone.to_complex()?;
        if c.hermitian_residual() > 1e-10 * c.frobenius_norm().max(1.0) {
            return Err(Error::InvalidOperator("monotone operator must be symmetric".into()));
        }
        let min = linalg::hermitian_eigendecomposition(&c)?.last().map_or(0.0, |p| p.value);
        if min < -1e-10 {
            return Err(Error::InvalidOperator(format!(
                "monotone operator must be positive semidefinite (min eigenvalue {min})"
            )));
        }
        let mut shifted = monotone.scale(gamma);
        for i in 0..n {
            shifted.set(i, i, shifted.get(i, i) + 1.0);
        }
        Ok(Self::with_kind(n, OperatorKind::Resolvent { monotone, gamma, shifted }))
    }

    pub fn averaged(alpha: f64, inner: OperatorMap) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfRange { name: "alpha", value: alpha });
        }
        let dim = inner.dim;
        Ok(Self::with_kind(dim, OperatorKind::Averaged { alpha, inner: Box::new(inner) }))
    }

    /// `factors[0]` is applied first.
    pub fn compose(factors: Vec<OperatorMap>) -> Result<Self> {
        let dim = factors.first().map(|f| f.dim).ok_or_else(|| Error::InvalidOperator("empty composition".into()))?;
        if let Some(f) = factors.iter().find(|f| f.dim != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: f.dim });
        }
        Ok(Self::with_kind(dim, OperatorKind::Composition(CompositionOp { factors })))
    }

    /// `T^n` as an `n`-fold composition.
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Ok(Self::identity(self.dim));
        }
        Self::compose(vec![self.clone(); n])
    }

    pub fn black_box(name: impl Into<String>, dim: usize, map: BlackBoxFn, asserted_lipschitz: Option<f64>) -> Self {
        Self::with_kind(dim, OperatorKind::BlackBox { name: name.into(), map, asserted_lipschitz })
    }

    /// Overrides the derived fixed-point metadata.
    pub fn with_fixed_points(mut self, info: FixedPointInfo) -> Self {
        self.fixed_points = Some(info);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn fixed_points(&self) -> Option<&FixedPointInfo> {
        self.fixed_points.as_ref()
    }

    pub fn lipschitz_upper(&self) -> f64 {
        lipschitz_certified(self)
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        match &self.kind {
            OperatorKind::Affine { linear, offset } => {
                let mut y = linear.mul_vec(x)?;
                for (yi, bi) in y.iter_mut().zip(offset) {
                    *yi += bi;
                }
                Ok(y)
            }
            OperatorKind::Rotation { angle } => {
                let (c, s) = quarter_turn_cos_sin(*angle);
                Ok(vec![c * x[0] - s * x[1], s * x[0] + c * x[1]])
            }
            OperatorKind::Scaling { factor } => Ok(x.iter().map(|v| factor * v).collect()),
            OperatorKind::Projection(set) => set.project(x),
            OperatorKind::ProxL1 { gamma } => Ok(x.iter().map(|&v| v.signum() * (v.abs() - gamma).max(0.0)).collect()),
            OperatorKind::Resolvent { shifted, .. } => shifted.solve(x),
            OperatorKind::Averaged { alpha, inner } => {
                let s = inner.apply(x)?;
                Ok(x.iter().zip(&s).map(|(a, b)| (1.0 - alpha) * a + alpha * b).collect())
            }
            OperatorKind::Composition(c) => {
                let mut y = x.to_vec();
                for f in &c.factors {
                    y = f.apply(&y)?;
                }
                Ok(y)
            }
            OperatorKind::BlackBox { map, .. } => {
                let y = map(x);
                check_len(self.dim, y.len())?;
                Ok(y)
            }
        }
    }

    /// `(L, b)` with `T x = L x + b`, when the map is affine.
    pub fn as_affine(&self) -> Option<(RealMatrix, Vec<f64>)> {
        let n = self.dim;
        match &self.kind {
            OperatorKind::Affine { linear, offset } => Some((linear.clone(), offset.clone())),
            OperatorKind::Rotation { angle } => {
                let (c, s) = quarter_turn_cos_sin(*angle);
                Some((RealMatrix::from_rows(vec![vec![c, -s], vec![s, c]]).ok()?, vec![0.0; 2]))
            }
            OperatorKind::Scaling { factor } => Some((RealMatrix::identity(n).scale(*factor), vec![0.0; n])),
            OperatorKind::Resolvent { shifted, .. } => {
                let mut inv = RealMatrix::zeros(n, n);
                for j in 0..n {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    let col = shifted.solve(&e).ok()?;
                    for (i, v) in col.into_iter().enumerate() {
                        inv.set(i, j, v);
                    }
                }
                Some((inv, vec![0.0; n]))
            }
            OperatorKind::Averaged { alpha, inner } => {
                let (l, b) = inner.as_affine()?;
                let mut m = l.scale(*alpha);
                for i in 0..n {
                    m.set(i, i, m.get(i, i) + 1.0 - alpha);
                }
                Some((m, b.iter().map(|v| alpha * v).collect()))
            }
            OperatorKind::Composition(c) => {
                let mut l = RealMatrix::identity(n);
                let mut b = vec![0.0; n];
                for f in &c.factors {
                    let (lf, bf) = f.as_affine()?;
                    l = lf.mul(&l).ok()?;
                    b = lf.mul_vec(&b).ok()?;
                    for (bi, o) in b.iter_mut().zip(&bf) {
                        *bi += o;
                    }
                }
                Some((l, b))
            }
            OperatorKind::Projection(_) | OperatorKind::ProxL1 { .. } | OperatorKind::BlackBox { .. } => None,
        }
    }

    fn derive_fixed_points(&self) -> Option<FixedPointInfo> {
        let origin = vec![0.0; self.dim];
        match &self.kind {
            OperatorKind::Affine { linear, offset } => {
                let i_minus_l = RealMatrix::identity(self.dim).sub(linear).ok()?;
                i_minus_l.solve(offset).ok().map(FixedPointInfo::Point)
            }
            OperatorKind::Rotation { angle } => {
                let (c, s) = quarter_turn_cos_sin(*angle);
                (!(c == 1.0 && s == 0.0)).then_some(FixedPointInfo::Point(origin))
            }
            OperatorKind::Scaling { factor } => (*factor != 1.0).then_some(FixedPointInfo::Point(origin)),
            OperatorKind::Projection(set) => Some(FixedPointInfo::Set(set.clone())),
            OperatorKind::ProxL1 { .. } | OperatorKind::Resolvent { .. } => Some(FixedPointInfo::Point(origin)),
            OperatorKind::Averaged { inner, .. } => inner.fixed_points.clone(),
            OperatorKind::Composition(c) => {
                let mut shared: Option<&Vec<f64>> = None;
                for f in &c.factors {
                    match (&f.fixed_points, shared) {
                        (Some(FixedPointInfo::Point(p)), None) => shared = Some(p),
                        (Some(FixedPointInfo::Point(p)), Some(q)) if distance(p, q) <= FIXED_POINT_TOL => {}
                        _ => return None,
                    }
                }
                shared.cloned().map(FixedPointInfo::Point)
            }
            OperatorKind::BlackBox { .. } => None,
        }
    }

    /// Short human-readable descriptor for trace metadata.
    pub fn describe(&self) -> String {
        match &self.kind {
            OperatorKind::Affine { linear, offset } => {
                let rows: Vec<Vec<f64>> = linear.clone().into();
                format!("affine(L={rows:?}, b={offset:?})")
            }
            OperatorKind::Rotation { angle } => format!("rotation({angle})"),
            OperatorKind::Scaling { factor } => format!("scaling({factor})"),
            OperatorKind::Projection(set) => format!("projection({})", set.describe()),
            OperatorKind::ProxL1 { gamma } => format!("prox_l1({gamma})"),
            OperatorKind::Resolvent { gamma, .. } => format!("resolvent(gamma={gamma})"),
            OperatorKind::Averaged { alpha, inner } => format!("averaged({alpha}, {})", inner.describe()),
            OperatorKind::Composition(c) => {
                let parts: Vec<String> = c.factors.iter().rev().map(OperatorMap::describe).collect();
                format!("compose[{}]", parts.join(" ∘ "))
            }
            OperatorKind::BlackBox { name, asserted_lipschitz, .. } => match asserted_lipschitz {
                Some(l) => format!("black_box({name}, asserted Lip ≤ {l})"),
                None => format!("black_box({name})"),
            },
        }
    }

    /// `‖T z − z‖`
    pub fn fixed_point_residual(&self, z: &[f64]) -> Result<f64> {
        Ok(distance(&self.apply(z)?, z))
    }
}

/// Certified upper bound on `Lip(T)`.
pub fn lipschitz_certified(op: &OperatorMap) -> f64 {
    match &op.kind {
        OperatorKind::Affine { linear, .. } => linear.spectral_norm(),
        OperatorKind::Scaling { factor } => factor.abs(),
        OperatorKind::Rotation { .. }
        | OperatorKind::Projection(_)
        | OperatorKind::ProxL1 { .. }
        | OperatorKind::Resolvent { .. } => 1.0,
        OperatorKind::Averaged { alpha, inner } => (1.0 - alpha) + alpha * lipschitz_certified(inner),
        OperatorKind::Composition(c) => c.certified_lipschitz(),
        OperatorKind::BlackBox { asserted_lipschitz, .. } => asserted_lipschitz.unwrap_or(f64::INFINITY),
    }
}

fn sample_ball(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let dir: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let n = norm(&dir).max(f64::MIN_POSITIVE);
    let r = SAMPLE_RADIUS * rng.random::<f64>().powf(1.0 / dim as f64);
    dir.into_iter().map(|v| v * r / n).collect()
}

/// The pairs `lipschitz_sampled_lower` draws: uniform on the ball of radius 10.
pub fn sample_pairs(dim: usize, trials: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| (sample_ball(&mut rng, dim), sample_ball(&mut rng, dim))).collect()
}

/// Monte Carlo lower estimate of `sup ‖Tx − Ty‖ / ‖x − y‖`.
pub fn lipschitz_sampled_lower(op: &OperatorMap, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::OutOfRange { name: "trials", value: 0.0 });
    }
    let mut best = 0.0f64;
    for (x, y) in sample_pairs(op.dim, trials, seed) {
        let d = distance(&x, &y);
        if d == 0.0 {
            continue;
        }
        best = best.max(distance(&op.apply(&x)?, &op.apply(&y)?) / d);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointMethod {
    /// Every declared point coincides and lies in every declared set.
    SharedPoint,
    AlternatingProjections {
        iterations: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointSearch {
    Found { point: Vec<f64>, method: FixedPointMethod },
    Absent { reason: String },
}

impl FixedPointSearch {
    pub fn point(&self) -> Option<&[f64]> {
        match self {
            Self::Found { point, .. } => Some(point),
            Self::Absent { .. } => None,
        }
    }
}

/// A point of `∩ Fix(T_t)` derived from the members' metadata.
pub fn common_fixed_point(family: &[OperatorMap]) -> Result<FixedPointSearch> {
    let dim = family.first().map(|t| t.dim).unwrap_or(0);
    common_fixed_point_from(family, &vec![0.0; dim])
}

/// As [`common_fixed_point`], starting alternating projections at `start`.
pub fn common_fixed_point_from(family: &[OperatorMap], start: &[f64]) -> Result<FixedPointSearch> {
    let first = family.first().ok_or_else(|| Error::InvalidOperator("empty operator family".into()))?;
    let dim = first.dim;
    check_len(dim, start.len())?;
    let mut points = Vec::new();
    let mut sets = Vec::new();
    for (index, op) in family.iter().enumerate() {
        check_len(dim, op.dim)?;
        match &op.fixed_points {
            Some(FixedPointInfo::Point(p)) => points.push(p.clone()),
            Some(FixedPointInfo::Set(s)) => sets.push(s.clone()),
            None => return Err(Error::MissingFixedPointMetadata { index }),
        }
    }

    let (point, method) = if let Some(z) = points.first() {
        if let Some(p) = points.iter().find(|p| distance(p, z) > FIXED_POINT_TOL) {
            return Ok(FixedPointSearch::Absent { reason: format!("declared fixed points {z:?} and {p:?} differ") });
        }
        if let Some(s) = sets.iter().find(|s| !s.contains(z, FIXED_POINT_TOL)) {
            return Ok(FixedPointSearch::Absent {
                reason: format!("declared fixed point {z:?} lies outside {}", s.describe()),
            });
        }
        (z.clone(), FixedPointMethod::SharedPoint)
    } else {
        match alternating_projections(&sets, start)? {
            Some((x, iterations)) => (x, FixedPointMethod::AlternatingProjections { iterations }),
            None => {
                return Ok(FixedPointSearch::Absent {
                    reason: format!(
                        "alternating projections did not reach residual {ALTERNATING_RESIDUAL:e} \
                         within {ALTERNATING_MAX_ITER} sweeps; the intersection may be empty"
                    ),
                })
            }
        }
    };

    for (index, op) in family.iter().enumerate() {
        let residual = op.fixed_point_residual(&point)?;
        if residual > FIXED_POINT_TOL {
            return Err(Error::FixedPointVerification { index, residual });
        }
    }
    Ok(FixedPointSearch::Found { point, method })
}

fn alternating_projections(sets: &[ConvexSet], start: &[f64]) -> Result<Option<(Vec<f64>, usize)>> {
    let mut x = start.to_vec();
    for iteration in 0..ALTERNATING_MAX_ITER {
        let mut residual = 0.0f64;
        for s in sets {
            residual = residual.max(distance(&s.project(&x)?, &x));
        }
        if residual <= ALTERNATING_RESIDUAL {
            return Ok(Some((x, iteration)));
        }
        for s in sets {
            x = s.project(&x)?;
        }
    }
    Ok(None)
}
