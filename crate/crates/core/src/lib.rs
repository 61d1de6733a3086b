//! Finite-dimensional laboratory for projection logic and event-indexed
//! contraction analysis.
//!
//! The crate is split into four layers:
//!
//! * [`linalg`]: dense complex matrices, projections, effects, a cyclic
//!   Jacobi eigensolver and the subspace lattice operations built on it.
//! * [`logic`]: valuations, the anchored implication connective, its
//!   classical reduction, the Sasaki hook, residuation, sequent rules and
//!   the threshold extension to effects.
//! * [`operators`]: symbolic nonexpansive maps on `R^n` with auditable
//!   Lipschitz certificates and fixed-point metadata.
//! * [`iteration`]: schedules, orbits, block certificates, decay envelopes
//!   and the single-map / anchored-subspace rate checks.

pub mod error;
pub mod iteration;
pub mod linalg;
pub mod logic;
pub mod operators;

pub use error::{Error, Result};
pub use iteration::{
    anchored_run, block_certify, classical_rate_check, envelope_check, envelope_value, power_contraction_index,
    run_orbit, slope_bounds, tightness_schedule, uniqueness_witness, Block, EnvelopeReport, EnvelopeSpec,
    EventSchedule, FixedPointPolicy, OperatorSequence, OrbitTrace, TightnessVariant,
};
pub use linalg::{
    commutator, hermitian_eigendecomposition, operator_norm, spectral_threshold_projection, subspace_join,
    subspace_meet, ComplexMatrix, EffectOp, EigenPair, ProjectionOp, RealMatrix, StateVector, C64,
};
pub use logic::{
    anchored_implication, commutation_side_condition, no_synonym_table, reduced_implication_projection,
    residuation_check, sasaki_hook, sequent_apply, tau_anchored_implication, valuate, Anchor, Proposition, SequentRule,
    Valuation,
};
pub use operators::{
    common_fixed_point, lipschitz_certified, lipschitz_sampled_lower, ConvexSet, FixedPointInfo, OperatorKind,
    OperatorMap, OperatorSpec,
};
