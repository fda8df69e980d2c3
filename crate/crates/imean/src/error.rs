use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground sets differ: {left} vs {right}")]
    GroundMismatch { left: usize, right: usize },
    #[error("invalid ground set: {0}")]
    InvalidGround(String),
    #[error("not a partial bijection: {0}")]
    NotInjective(String),
    #[error("point {point} outside ground set of size {ground}")]
    PointOutOfRange { point: usize, ground: usize },
    #[error("elements are not compatible")]
    NotCompatible,
    #[error("elements are not orthogonal")]
    NotOrthogonal,
    #[error("not an element of the monoid")]
    NotAnElement,
    #[error("idempotent is zero")]
    ZeroIdempotent,
    #[error("mean assigns zero mass to the idempotent")]
    ZeroMass,
    #[error("closure exceeded cap of {0} elements")]
    CapExceeded(usize),
    #[error("matrix shapes do not match")]
    ShapeMismatch,
    #[error("matrix entry is not an element of the base monoid")]
    BaseMismatch,
    #[error("map is not bijective: {0}")]
    NotBijective(String),
    #[error("partition data inconsistent: {0}")]
    PartitionMismatch(String),
    #[error("dimension mismatch at tower level {level}")]
    DimensionMismatch { level: usize },
    #[error("zero column {col} in tower map at level {level}")]
    ZeroColumn { level: usize, col: usize },
    #[error("tower base level must be a single block of size 1")]
    BadBase,
    #[error("vector is not normalized")]
    NotNormalized,
    #[error("tower has a level with more than one block")]
    NotUHF,
    #[error("invalid pencil: {0}")]
    BadPencil(String),
    #[error("invalid witness: {0}")]
    BadWitness(String),
    #[error("monoid is not piecewise factorizable")]
    NotPiecewiseFactorizable,
    #[error("modulus {0} exceeds the configured bound")]
    OverflowGuard(u128),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
