use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{ComplexMatrix, HermitianOperator};
use crate::{tolerance, Error, Result};

const MAX_SWEEPS: usize = 10_000;

/// Eigendecomposition `A = U diag(λ) U†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian operator.
///
/// The reconstruction `U diag(λ) U†` is checked against the input and must
/// agree to `tolerance::EIGEN` relative to `max(1, ‖A‖_F)`.
pub fn eig_hermitian(a: &HermitianOperator) -> Result<Eigen> {
    eig_hermitian_matrix(a.matrix())
}

pub(crate) fn eig_hermitian_matrix(a: &ComplexMatrix) -> Result<Eigen> {
    let d = a.rows();
    // Use the symmetrized operator so that the lower triangle read by the
    // solver carries the full Hermitian part.
    let m = a.inner();
    let sym: DMatrix<Complex64> = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS).ok_or(Error::EigenNonConvergence)?;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);

    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ));
    let recon = &vectors * diag * vectors.adjoint();
    let err = (recon - m).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // Floor at 1 so rounding noise in a near-zero block is not amplified.
    let scale = a.frobenius().max(1.0);
    if err > tolerance::EIGEN * scale {
        return Err(Error::EigenReconstruction(err / scale));
    }
    Ok(Eigen {
        values,
        vectors: ComplexMatrix::new(vectors)?,
    })
}
