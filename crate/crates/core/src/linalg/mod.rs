//! Dense complex linear algebra at desk scale.
//!
//! Tolerance checks on operators use the Frobenius norm, which bounds the
//! spectral norm from above.

mod eigen;
mod matrix;

pub use eigen::{hermitian_eigendecomposition, EigenPair, JACOBI_MAX_SWEEPS, JACOBI_OFF_TOL};
pub use matrix::{complex_norm, distance, dot, inner, norm, ComplexMatrix, JsonScalar, RealMatrix, C64};

use serde::Serialize;

use crate::error::{Error, Result};

/// Default algebraic tolerance for projection and effect invariants.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenvalues this close to a threshold count as at or above it.
pub const EIG_TIE_TOL: f64 = 1e-9;

/// Eigenvalue cutoff separating a range from a kernel in meet/join.
pub const RANK_TOL: f64 = 1e-9;

/// Orthogonal projection `E = E* = E²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionOp {
    matrix: ComplexMatrix,
    tol: f64,
}

impl ProjectionOp {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tol(matrix, DEFAULT_TOL)
    }

    pub fn with_tol(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let residual = matrix.hermitian_residual();
        if residual > tol {
            return Err(Error::NotSelfAdjoint { residual });
        }
        let residual = (&(&matrix * &matrix) - &matrix).frobenius_norm();
        if residual > tol {
            return Err(Error::NotIdempotent { residual });
        }
        Ok(Self { matrix, tol })
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(dim), tol: DEFAULT_TOL }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim), tol: DEFAULT_TOL }
    }

    /// Diagonal projection; entries must be 0 or 1.
    pub fn diag(entries: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag(entries))
    }

    /// Projection onto `span{v}`; `v` need not be normalized.
    pub fn rank_one(v: &[C64]) -> Result<Self> {
        Self::onto_span(&[v.to_vec()])
    }

    pub fn rank_one_real(v: &[f64]) -> Result<Self> {
        Self::rank_one(&v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// Projection onto the span of arbitrary vectors (Gram–Schmidt, dependent
    /// vectors dropped).
    pub fn onto_span(vectors: &[Vec<C64>]) -> Result<Self> {
        let dim = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Shape("span of an empty list has no dimension".into()))?;
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            let scale = complex_norm(v);
            let mut w = v.clone();
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(b, &w);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let n = complex_norm(&w);
            if n > 1e-10 * scale.max(1e-300) && n > 1e-14 {
                basis.push(w.into_iter().map(|z| z / n).collect());
            }
        }
        Ok(Self::from_orthonormal(dim, &basis))
    }

    /// `Σ v v*` over an orthonormal family (not re-checked beyond the invariants).
    pub(crate) fn from_orthonormal(dim: usize, basis: &[Vec<C64>]) -> Self {
        let matrix = basis.iter().fold(ComplexMatrix::zeros(dim), |acc, v| &acc + &ComplexMatrix::outer(v, v));
        Self { matrix, tol: DEFAULT_TOL }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `I − E`
    pub fn complement(&self) -> Self {
        Self { matrix: &ComplexMatrix::identity(self.dim()) - &self.matrix, tol: self.tol }
    }

    pub fn rank(&self) -> usize {
        self.trace().round() as usize
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix.get(i, i).re).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.frobenius_norm() <= self.tol
    }

    /// Projection order `E ≤ F` iff `‖EF − E‖ ≤ tol`.
    pub fn le(&self, other: &Self) -> Result<bool> {
        let ef = self.matrix.try_mul(&other.matrix)?;
        Ok((&ef - &self.matrix).frobenius_norm() <= self.tol.max(other.tol))
    }

    /// Orthonormal basis of the range.
    pub fn range_basis(&self) -> Vec<Vec<C64>> {
        let jac = eigen::jacobi(self.matrix());
        eigen::sorted_pairs(jac).into_iter().filter(|p| p.value > 0.5).map(|p| p.vector).collect()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && (&self.matrix - &other.matrix).max_abs() <= tol
    }
}

/// Hermitian operator with spectrum in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectOp {
    matrix: ComplexMatrix,
    tol: f64,
    spectrum: Vec<EigenPair>,
}

impl EffectOp {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tol(matrix, DEFAULT_TOL)
    }

    pub fn with_tol(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let residual = matrix.hermitian_residual();
        if residual > tol {
            return Err(Error::NotSelfAdjoint { residual });
        }
        let spectrum = hermitian_eigendecomposition(&matrix)?;
        let max = spectrum.first().map_or(0.0, |p| p.value);
        let min = spectrum.last().map_or(0.0, |p| p.value);
        if min < -tol || max > 1.0 + tol {
            return Err(Error::NotEffect { min, max });
        }
        Ok(Self { matrix, tol, spectrum })
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag(values))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn spectrum(&self) -> &[EigenPair] {
        &self.spectrum
    }
}

impl From<ProjectionOp> for EffectOp {
    fn from(p: ProjectionOp) -> Self {
        let spectrum = hermitian_eigendecomposition(&p.matrix).expect("a validated projection is Hermitian");
        Self { matrix: p.matrix, tol: p.tol, spectrum }
    }
}

/// Unit vector in `C^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateVector {
    entries: Vec<C64>,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(entries: Vec<C64>) -> Result<Self> {
        Self::with_tol(entries, Self::NORM_TOL)
    }

    pub fn with_tol(entries: Vec<C64>, norm_tol: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape("state must have at least one entry".into()));
        }
        let norm = complex_norm(&entries);
        if (norm - 1.0).abs() > norm_tol {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(Self { entries })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(entries: Vec<C64>) -> Result<Self> {
        let norm = complex_norm(&entries);
        if entries.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(Self { entries: entries.into_iter().map(|z| z / norm).collect() })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_i` (zero-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); dim];
        entries[i] = C64::new(1.0, 0.0);
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }
}

/// `[X, Y] = XY − YX`
pub fn commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.try_mul(y)?.try_sub(&y.try_mul(x)?)
}

/// Largest singular value, via the top eigenvalue of `A*A`.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    let gram = (&a.adjoint() * a).hermitian_part();
    eigen::largest_eigenvalue(&gram).max(0.0).sqrt()
}

/// Spectral projection `1_{[τ,1]}(A)` with the tied eigenvalues reported.
#[derive(Clone, Debug)]
pub struct Thresholded {
    pub projection: ProjectionOp,
    /// Eigenvalues within [`EIG_TIE_TOL`] of `τ`; these are included.
    pub ties: Vec<f64>,
}

pub fn spectral_threshold_projection(a: &EffectOp, tau: f64) -> Result<Thresholded> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::OutOfRange { name: "tau", value: tau });
    }
    let mut basis = Vec::new();
    let mut ties = Vec::new();
    for pair in a.spectrum() {
        if pair.value >= tau - EIG_TIE_TOL {
            if (pair.value - tau).abs() <= EIG_TIE_TOL {
                ties.push(pair.value);
            }
            basis.push(pair.vector.clone());
        }
    }
    let projection = ProjectionOp::from_orthonormal(a.dim(), &basis);
    // re-validate so every returned projection carries the invariants
    let projection = ProjectionOp::with_tol(projection.matrix, a.tol().max(DEFAULT_TOL))?;
    Ok(Thresholded { projection, ties })
}

/// Projection onto `ran(E) ∩ ran(F)`, computed as the kernel of `2I − E − F`.
pub fn subspace_meet(e: &ProjectionOp, f: &ProjectionOp) -> Result<ProjectionOp> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), found: f.dim() });
    }
    let n = e.dim();
    let m = &(&ComplexMatrix::identity(n).scale_real(2.0) - e.matrix()) - f.matrix();
    let pairs = eigen::sorted_pairs(eigen::jacobi(&m));
    let basis: Vec<_> = pairs.into_iter().filter(|p| p.value <= RANK_TOL).map(|p| p.vector).collect();
    ProjectionOp::with_tol(ProjectionOp::from_orthonormal(n, &basis).matrix, e.tol.max(f.tol))
}

/// Projection onto `ran(E) + ran(F)`, computed as the range of `E + F`.
pub fn subspace_join(e: &ProjectionOp, f: &ProjectionOp) -> Result<ProjectionOp> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), found: f.dim() });
    }
    let n = e.dim();
    let s = e.matrix() + f.matrix();
    let pairs = eigen::sorted_pairs(eigen::jacobi(&s));
    let basis: Vec<_> = pairs.into_iter().filter(|p| p.value > RANK_TOL).map(|p| p.vector).collect();
    ProjectionOp::with_tol(ProjectionOp::from_orthonormal(n, &basis).matrix, e.tol.max(f.tol))
}
