use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Shape("matrix must have at least one row".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {dim}", row.len())));
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect())
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// `u v*`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of unequal lengths");
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok((0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum()).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖A − A*‖_F`
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(A + A*) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Real part, discarding imaginary components.
    pub fn real_part(&self) -> RealMatrix {
        RealMatrix { rows: self.dim, cols: self.dim, data: self.data.iter().map(|z| z.re).collect() }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    if z.im == 0.0 {
                        format!("{:.6}", z.re)
                    } else {
                        format!("{:.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for &ComplexMatrix {
            type Output = ComplexMatrix;
            /// Panics on dimension mismatch; use the `try_` form for fallible code.
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                self.$checked(rhs).expect("matrix dimension mismatch")
            }
        }
    };
}
forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

/// JSON scalar: either a bare real or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonScalar {
    Real(f64),
    Pair([f64; 2]),
}

impl From<JsonScalar> for C64 {
    fn from(s: JsonScalar) -> Self {
        match s {
            JsonScalar::Real(re) => C64::new(re, 0.0),
            JsonScalar::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            (0..self.dim).map(|i| (0..self.dim).map(|j| [self.get(i, j).re, self.get(i, j).im]).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<JsonScalar>> = Vec::deserialize(deserializer)?;
        let rows = rows.into_iter().map(|r| r.into_iter().map(C64::from).collect()).collect();
        ComplexMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Dense real matrix, row-major. Used by the operator layer where every
/// example lives in `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for RealMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<RealMatrix> for Vec<Vec<f64>> {
    fn from(m: RealMatrix) -> Self {
        (0..m.rows).map(|i| m.data[i * m.cols..(i + 1) * m.cols].to_vec()).collect()
    }
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Shape("matrix must have at least one row".into()));
        }
        let c = rows[0].len();
        if c == 0 {
            return Err(Error::Shape("matrix must have at least one column".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {c}", row.len())));
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn powi(&self, n: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..n {
            acc = self.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::Shape("solve requires a square matrix".into()));
        }
        let n = self.rows;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs())).unwrap();
            if a[pivot * n + col].abs() <= 1e-13 * scale {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                x.swap(col, pivot);
            }
            let d = a[col * n + col];
            for i in col + 1..n {
                let f = a[i * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[i * n + j] -= f * a[col * n + j];
                }
                x[i] -= f * x[col];
            }
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / a[i * n + i];
        }
        Ok(x)
    }

    pub fn to_complex(&self) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(Error::Shape("complex embedding requires a square matrix".into()));
        }
        Ok(ComplexMatrix::from_fn(self.rows, |i, j| C64::new(self.get(i, j), 0.0)))
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let gram = self.transpose().mul(self).expect("AᵀA is always defined");
        let g = gram.to_complex().expect("gram matrix is square");
        super::eigen::largest_eigenvalue(&g).max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Euclidean norm, accumulated with `hypot` so axis-aligned vectors are exact.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc: f64, v| acc.hypot(*v))
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(0.0, |acc: f64, (a, b)| acc.hypot(a - b))
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn complex_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u, v⟩ = Σ conj(u_i) v_i`
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
