#![allow(dead_code)]

use anchorlab::{ComplexMatrix, ProjectionOp, StateVector, C64};
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn config(cases: u32, seed: u64) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

/// `dim × dim` complex matrix from `2·dim²` interleaved re/im entries.
pub fn complex_matrix(dim: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |i, j| {
        let k = 2 * (i * dim + j);
        C64::new(entries[k], entries[k + 1])
    })
}

pub fn hermitian(dim: usize, entries: &[f64]) -> ComplexMatrix {
    let g = complex_matrix(dim, entries);
    (&g + &g.adjoint()).scale_real(0.5)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(r: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| C64::new(r.sample(StandardNormal), r.sample(StandardNormal))).collect()
}

/// Columns of a random unitary (Gram–Schmidt on Gaussian columns).
pub fn unitary(dim: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut r = rng(seed);
    let mut cols: Vec<Vec<C64>> = Vec::new();
    while cols.len() < dim {
        let mut v = gaussian_vec(&mut r, dim);
        for _ in 0..2 {
            for c in &cols {
                let p: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
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

/// `U diag(d) U*`.
pub fn with_spectrum(u: &[Vec<C64>], d: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), |i, j| u.iter().zip(d).map(|(c, &w)| c[i] * c[j].conj() * w).sum())
}

pub fn projection(u: &[Vec<C64>], bits: &[bool]) -> ProjectionOp {
    let d: Vec<f64> = bits.iter().map(|&b| f64::from(u8::from(b))).collect();
    ProjectionOp::new(with_spectrum(u, &d)).unwrap()
}

pub fn column_state(u: &[Vec<C64>], i: usize) -> StateVector {
    StateVector::normalized(u[i].clone()).unwrap()
}

pub fn random_state(dim: usize, seed: u64) -> StateVector {
    StateVector::normalized(gaussian_vec(&mut rng(seed), dim)).unwrap()
}
