use num_complex::Complex64;

use super::eigen::eig_hermitian_matrix;
use super::ComplexMatrix;
use crate::{tolerance, Error, Result};

/// Square complex matrix with validated Hermitian structure.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.rows(), matrix.cols()));
        }
        let residual = Self::hermiticity_residual(&matrix);
        if residual > tolerance::HERMITIAN {
            return Err(Error::NotHermitian(residual));
        }
        Ok(Self(matrix))
    }

    /// `‖A - A†‖_F / ‖A‖_F` (zero for the zero matrix).
    pub fn hermiticity_residual(matrix: &ComplexMatrix) -> f64 {
        let norm = matrix.frobenius();
        if norm == 0.0 {
            return 0.0;
        }
        (matrix - &matrix.adjoint()).frobenius() / norm
    }

    pub fn identity(d: usize) -> Self {
        Self(ComplexMatrix::identity(d))
    }

    pub fn zeros(d: usize) -> Self {
        Self(ComplexMatrix::zeros(d, d))
    }

    /// Projector onto the span of a single vector (normalized internally).
    pub fn projector(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero or non-finite state vector".into()));
        }
        let unit: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self(ComplexMatrix::outer(&unit)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = eig_hermitian_matrix(&self.0)?;
        Ok(eig.values[0])
    }

    /// `‖M² - M‖_F / max(1, ‖M‖_F)`.
    pub fn projectivity_residual(&self) -> f64 {
        let sq = &self.0 * &self.0;
        (&sq - &self.0).frobenius() / self.0.frobenius().max(1.0)
    }

    /// Real part of `tr(A ρ)`.
    pub fn expectation(&self, rho: &DensityOperator) -> f64 {
        self.0.trace_product(rho.matrix()).re
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(Self::hermiticity_residual(&matrix) <= tolerance::HERMITIAN);
        Self(matrix)
    }
}

/// Kronecker product of two Hermitian operators, bounded by [`tolerance::MAX_DIM`].
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    tensor_with_limit(a, b, tolerance::MAX_DIM)
}

pub fn tensor_with_limit(a: &HermitianOperator, b: &HermitianOperator, max_dim: usize) -> Result<HermitianOperator> {
    let dim = a.dim().saturating_mul(b.dim());
    if dim > max_dim {
        return Err(Error::DimensionOverflow { dim, max: max_dim });
    }
    Ok(HermitianOperator(a.0.kron(&b.0)))
}

/// Unit-trace positive semi-definite Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(HermitianOperator);

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.matrix().trace();
        if (trace.re - 1.0).abs() > tolerance::TRACE || trace.im.abs() > tolerance::TRACE {
            return Err(Error::InvalidTrace(trace.re));
        }
        let min = op.min_eigenvalue()?;
        if min < -tolerance::PSD {
            return Err(Error::NotPsd(min));
        }
        Ok(Self(op))
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(matrix)?)
    }

    /// Pure state `|ψ⟩⟨ψ|`; the vector is normalized.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Ok(Self(HermitianOperator::projector(psi)?))
    }

    /// Computational basis state `|k⟩⟨k|`.
    pub fn basis(d: usize, k: usize) -> Self {
        Self(HermitianOperator(ComplexMatrix::basis_projector(d, k)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(HermitianOperator(ComplexMatrix::identity(d).scale(1.0 / d as f64)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.0.matrix()
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self(tensor(&self.0, &other.0)?))
    }

    /// Convex mixture `Σ p_i ρ_i`; weights must form a distribution.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidDistribution("empty mixture".into()))?;
        let d = first.1.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        let mut total = 0.0;
        for (p, rho) in parts {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: rho.dim(),
                });
            }
            if p.is_nan() || *p < 0.0 {
                return Err(Error::InvalidDistribution(format!("negative weight {p}")));
            }
            total += p;
            acc = &acc + &rho.matrix().scale(*p);
        }
        if (total - 1.0).abs() > tolerance::PROBABILITY {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Self::from_matrix(acc)
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self(HermitianOperator::from_trusted(matrix))
    }
}
