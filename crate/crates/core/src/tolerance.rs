//! Numerical tolerances shared across the crate.

/// Relative Frobenius tolerance on `A - A†`.
pub const HERMITIAN: f64 = 1e-9;
/// Relative Frobenius tolerance on `M² - M`.
pub const PROJECTIVE: f64 = 1e-9;
/// Elementwise tolerance on `Σ_v M_v - I`.
pub const COMPLETENESS: f64 = 1e-9;
/// Relative tolerance on off-diagonal mass after simultaneous diagonalization.
pub const DIAGONAL: f64 = 1e-9;
/// Absolute tolerance on the trace of a density operator.
pub const TRACE: f64 = 1e-9;
/// Absolute tolerance on Born probabilities.
pub const PROBABILITY: f64 = 1e-9;
/// Absolute tolerance on negative eigenvalues of PSD operators.
pub const PSD: f64 = 1e-10;
/// Commutator tolerance relative to `‖A‖_F ‖B‖_F`.
pub const COMMUTE: f64 = 1e-9;
/// Relative reconstruction tolerance of the Hermitian eigensolver.
pub const EIGEN: f64 = 1e-10;
/// Geometric tolerance for the Bloch-sphere orthant rule.
pub const GEOMETRY: f64 = 1e-9;

/// Default bound on Hilbert-space dimension.
pub const MAX_DIM: usize = 256;
/// Default bound on class size for the exact partitioner.
pub const EXACT_LIMIT: usize = 14;
