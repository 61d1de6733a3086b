//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Each rotation first applies a diagonal phase so the pivot entry becomes
//! real and non-negative, then a real plane rotation annihilates it. The
//! accumulated unitary holds the eigenvectors in its columns.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Stop once the off-diagonal Frobenius mass falls below this (times `max(1, ‖A‖_F)`).
pub const JACOBI_OFF_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian-ness required before decomposition, relative to `max(1, ‖A‖_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<C64>,
}

pub(crate) struct Jacobi {
    pub values: Vec<f64>,
    /// Eigenvectors in columns.
    pub vectors: ComplexMatrix,
    pub off: f64,
    pub sweeps: usize,
    pub converged: bool,
}

fn off_diagonal_mass(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub(crate) fn jacobi(a: &ComplexMatrix) -> Jacobi {
    let n = a.dim();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    let mut off = off_diagonal_mass(&m);
    while off >= threshold && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_mass(&m);
    }

    Jacobi { values: (0..n).map(|i| m.get(i, i).re).collect(), vectors: v, off, sweeps, converged: off < threshold }
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.dim();
    let apq = m.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }

    // Phase step: scale column q by d = conj(apq)/r and row q by conj(d).
    // Computed from the entry itself so real pivots give exactly ±1.
    let d = apq.conj() / r;
    let dc = d.conj();
    for k in 0..n {
        m.set(k, q, m.get(k, q) * d);
        v.set(k, q, v.get(k, q) * d);
    }
    for k in 0..n {
        m.set(q, k, m.get(q, k) * dc);
    }

    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let mkp = m.get(k, p);
        let mkq = m.get(k, q);
        m.set(k, p, mkp * c - mkq * s);
        m.set(k, q, mkp * s + mkq * c);
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c - vkq * s);
        v.set(k, q, vkp * s + vkq * c);
    }
    for k in 0..n {
        let mpk = m.get(p, k);
        let mqk = m.get(q, k);
        m.set(p, k, mpk * c - mqk * s);
        m.set(q, k, mpk * s + mqk * c);
    }
    m.set(p, q, C64::new(0.0, 0.0));
    m.set(q, p, C64::new(0.0, 0.0));
    m.set(p, p, C64::new(m.get(p, p).re, 0.0));
    m.set(q, q, C64::new(m.get(q, q).re, 0.0));
}

/// Rotates `x` so its first (near-)largest component is real and positive.
fn normalize_phase(x: &mut [C64]) {
    let max = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = x.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let phase = pivot.conj() / pivot.norm();
        for z in x.iter_mut() {
            *z *= phase;
        }
    }
}

/// Full orthonormal eigensystem of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eigendecomposition(a: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL * a.frobenius_norm().max(1.0) {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let jac = jacobi(a);
    if !jac.converged {
        return Err(Error::NoConvergence { sweeps: jac.sweeps, residual: jac.off });
    }
    Ok(sorted_pairs(jac))
}

pub(crate) fn sorted_pairs(jac: Jacobi) -> Vec<EigenPair> {
    let mut pairs: Vec<EigenPair> = jac
        .values
        .iter()
        .enumerate()
        .map(|(j, &value)| {
            let mut vector = jac.vectors.column(j);
            normalize_phase(&mut vector);
            EigenPair { value, vector }
        })
        .collect();
    pairs.sort_by(|a, b| b.value.total_cmp(&a.value));
    pairs
}

pub(crate) fn largest_eigenvalue(a: &ComplexMatrix) -> f64 {
    jacobi(a).values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}
