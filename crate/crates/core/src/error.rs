use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed matrix: {0}")]
    Shape(String),

    #[error("operator is not self-adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("operator is not idempotent (residual {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("operator is not an effect: spectrum [{min}, {max}] leaves [0, 1]")]
    NotEffect { min: f64, max: f64 },

    #[error("state is not unit norm (norm {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("commutation required: ‖{what}‖ = {residual:.3e}")]
    CommutationRequired { what: String, residual: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("malformed premises: {0}")]
    MalformedPremises(String),

    #[error("singular linear system")]
    Singular,

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("operator {index} carries no fixed-point metadata")]
    MissingFixedPointMetadata { index: usize },

    #[error("fixed-point verification failed for operator {index} (residual {residual:.3e})")]
    FixedPointVerification { index: usize, residual: f64 },

    #[error("reference point is not fixed by the operator at step {step} (residual {residual:.3e})")]
    UnverifiedFixedPoint { step: usize, residual: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("block {block} certificate {certificate} exceeds the claimed factor {claimed}")]
    BlockNotCertified { block: usize, certificate: f64, claimed: f64 },

    #[error("index {n} precedes the first event {first}")]
    BeforeFirstEvent { n: usize, first: usize },

    #[error("certified modulus {certificate} does not reach the target {target}")]
    NotContractive { certificate: f64, target: f64 },

    #[error("candidate {which} is not fixed by operator {member} (residual {residual:.3e})")]
    CandidateNotFixed { which: &'static str, member: usize, residual: f64 },

    #[error("rate bound violated at n = {n}: {lhs} > {rhs}")]
    RateViolation { n: usize, lhs: f64, rhs: f64 },
}
