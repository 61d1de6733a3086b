use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{distance, dot, norm, RealMatrix};

/// Closed convex sets with closed-form metric projections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ConvexSet {
    /// `{x : ⟨a, x⟩ ≤ b}`
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    /// `{x : lower ≤ x ≤ upper}` componentwise.
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{x : A x = b}`; `A` must have full row rank.
    AffineSet {
        matrix: RealMatrix,
        rhs: Vec<f64>,
    },
}

impl ConvexSet {
    pub fn dim(&self) -> usize {
        match self {
            Self::Halfspace { normal, .. } => normal.len(),
            Self::Box { lower, .. } => lower.len(),
            Self::Ball { center, .. } => center.len(),
            Self::AffineSet { matrix, .. } => matrix.ncols(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Halfspace { normal, .. } => {
                if norm(normal) == 0.0 {
                    return Err(Error::InvalidOperator("halfspace normal must be nonzero".into()));
                }
            }
            Self::Box { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(Error::DimensionMismatch { expected: lower.len(), found: upper.len() });
                }
                if lower.iter().zip(upper).any(|(l, u)| l > u) {
                    return Err(Error::InvalidOperator("box has lower > upper".into()));
                }
            }
            Self::Ball { radius, .. } => {
                if radius.is_nan() || *radius < 0.0 {
                    return Err(Error::OutOfRange { name: "radius", value: *radius });
                }
            }
            Self::AffineSet { matrix, rhs } => {
                if matrix.nrows() != rhs.len() {
                    return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: rhs.len() });
                }
                let gram = matrix.mul(&matrix.transpose())?;
                gram.solve(&vec![0.0; matrix.nrows()])
                    .map_err(|_| Error::InvalidOperator("affine set constraints are rank deficient".into()))?;
            }
        }
        if self.dim() == 0 {
            return Err(Error::InvalidOperator("convex set in zero dimensions".into()));
        }
        Ok(())
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(match self {
            Self::Halfspace { normal, offset } => {
                let excess = dot(normal, x) - offset;
                if excess <= 0.0 {
                    x.to_vec()
                } else {
                    let s = excess / dot(normal, normal);
                    x.iter().zip(normal).map(|(v, a)| v - s * a).collect()
                }
            }
            Self::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).map(|(v, (l, u))| v.clamp(*l, *u)).collect()
            }
            Self::Ball { center, radius } => {
                let d = distance(x, center);
                if d <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / d;
                    x.iter().zip(center).map(|(v, c)| c + s * (v - c)).collect()
                }
            }
            Self::AffineSet { matrix, rhs } => {
                // x − Aᵀ (A Aᵀ)⁻¹ (A x − b)
                let mut r = matrix.mul_vec(x)?;
                for (ri, bi) in r.iter_mut().zip(rhs) {
                    *ri -= bi;
                }
                let gram = matrix.mul(&matrix.transpose())?;
                let w = gram.solve(&r)?;
                let corr = matrix.transpose().mul_vec(&w)?;
                x.iter().zip(&corr).map(|(v, c)| v - c).collect()
            }
        })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.project(x).map(|p| distance(&p, x) <= tol).unwrap_or(false)
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Halfspace { normal, offset } => format!("halfspace(a={normal:?}, b={offset})"),
            Self::Box { lower, upper } => format!("box({lower:?}, {upper:?})"),
            Self::Ball { center, radius } => format!("ball({center:?}, r={radius})"),
            Self::AffineSet { rhs, .. } => format!("affine_set({} constraints)", rhs.len()),
        }
    }
}
