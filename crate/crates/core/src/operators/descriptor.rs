//! JSON operator descriptors.
//!
//! ```json
//! {"kind": "quarter_turn"}
//! {"kind": "scaling", "factor": 0.8, "dim": 2}
//! {"kind": "projection", "set": {"shape": "halfspace", "normal": [1, 0], "offset": 1}}
//! {"kind": "averaged", "alpha": 0.5, "inner": {"kind": "rotation", "angle": 0.3}}
//! ```
//!
//! Any descriptor may carry `"fixed_point": [..]` to declare a known fixed point.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{ConvexSet, FixedPointInfo, OperatorMap};
use crate::error::Result;
use crate::linalg::RealMatrix;

/// Grammar version accepted by [`OperatorSpec`].
pub const DESCRIPTOR_VERSION: u32 = 1;

fn one() -> i32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    Affine {
        linear: RealMatrix,
        #[serde(default)]
        offset: Option<Vec<f64>>,
    },
    /// Planar rotation, angle in radians.
    Rotation {
        angle: f64,
    },
    /// Planar rotation by `turns · π/2`, exact.
    QuarterTurn {
        #[serde(default = "one")]
        turns: i32,
    },
    Scaling {
        factor: f64,
        dim: usize,
    },
    Projection {
        set: ConvexSet,
    },
    ProxL1 {
        gamma: f64,
        dim: usize,
    },
    Resolvent {
        matrix: RealMatrix,
        gamma: f64,
    },
    Averaged {
        alpha: f64,
        inner: Box<OperatorSpec>,
    },
    /// `factors[0]` is applied first.
    Composition {
        factors: Vec<OperatorSpec>,
    },
}

impl OperatorSpec {
    pub fn build(&self) -> Result<OperatorMap> {
        match self {
            Self::Affine { linear, offset } => {
                let b = offset.clone().unwrap_or_else(|| vec![0.0; linear.nrows()]);
                OperatorMap::affine(linear.clone(), b)
            }
            Self::Rotation { angle } => Ok(OperatorMap::rotation(*angle)),
            Self::QuarterTurn { turns } => Ok(OperatorMap::rotation(f64::from(*turns) * FRAC_PI_2)),
            Self::Scaling { factor, dim } => Ok(OperatorMap::scaling(*dim, *factor)),
            Self::Projection { set } => OperatorMap::projection(set.clone()),
            Self::ProxL1 { gamma, dim } => OperatorMap::prox_l1(*dim, *gamma),
            Self::Resolvent { matrix, gamma } => OperatorMap::resolvent(matrix.clone(), *gamma),
            Self::Averaged { alpha, inner } => OperatorMap::averaged(*alpha, inner.build()?),
            Self::Composition { factors } => {
                OperatorMap::compose(factors.iter().map(OperatorSpec::build).collect::<Result<_>>()?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    #[serde(flatten)]
    pub spec: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Vec<f64>>,
}

impl OperatorDescriptor {
    pub fn build(&self) -> Result<OperatorMap> {
        let op = self.spec.build()?;
        Ok(match &self.fixed_point {
            Some(p) => op.with_fixed_points(FixedPointInfo::Point(p.clone())),
            None => op,
        })
    }
}
