use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix entries are not finite")]
    NonFinite,

    #[error("entry count {entries} does not match a {rows}x{cols} matrix")]
    Shape { rows: usize, cols: usize, entries: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("not Hermitian (relative residual {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("POVM elements do not sum to the identity (max deviation {0:.3e})")]
    Incomplete(f64),

    #[error("POVM element {index} is not a projector (residual {residual:.3e})")]
    NotProjective { index: usize, residual: f64 },

    #[error("outcome labels are not distinct: {0}")]
    DuplicateOutcome(String),

    #[error("POVM has no elements")]
    EmptyPovm,

    #[error("outcome count {outcomes} does not match element count {elements}")]
    OutcomeCount { outcomes: usize, elements: usize },

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("eigensolver did not converge")]
    EigenNonConvergence,

    #[error("eigendecomposition reconstruction error {0:.3e} above tolerance")]
    EigenReconstruction(f64),

    #[error("measurements {0} and {1} do not commute")]
    Incompatible(usize, usize),

    #[error("ambiguous outcome assignment for basis vector {basis} (weight {weight:.3e})")]
    AmbiguousOutcome { basis: usize, weight: f64 },

    #[error("label alphabet mismatch")]
    AlphabetMismatch,

    #[error("invalid loss function: {0}")]
    InvalidLoss(String),

    #[error("invalid concept class: {0}")]
    InvalidClass(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exact partitioning supports at most {limit} predictors, got {size}")]
    ExactLimit { size: usize, limit: usize },

    #[error("infeasible budget: {total} samples for {subclasses} subclasses")]
    InfeasibleBudget { total: usize, subclasses: usize },

    #[error("insufficient samples: need {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("sample {0} was already measured")]
    SampleConsumed(usize),

    #[error("invalid manifest: {0}")]
    Manifest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
