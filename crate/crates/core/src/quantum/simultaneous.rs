use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eigen::eig_hermitian_matrix;
use super::{ComplexMatrix, HermitianOperator, ProjectivePovm};
use crate::{tolerance, Error, Result};

/// Eigenvalues of the compressed label observable must sit this close to an
/// integer; anything further means the block is not invariant.
const CLUSTER_TOL: f64 = 1e-6;

/// An orthonormal basis diagonalizing a compatible family of projective
/// measurements, together with the outcome each basis vector produces.
#[derive(Clone, Debug, PartialEq)]
pub struct SharedEigenbasis {
    /// Unitary whose columns are the shared eigenvectors.
    pub basis: ComplexMatrix,
    /// `outcome_table[k][j]`: outcome index of measurement `j` on basis vector `k`.
    pub outcome_table: Vec<Vec<usize>>,
}

impl SharedEigenbasis {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
}

/// Whether two operators commute within `tolerance::COMMUTE`, relative to
/// `‖A‖_F ‖B‖_F`.
pub(crate) fn operators_commute(a: &HermitianOperator, b: &HermitianOperator) -> bool {
    let scale = a.matrix().frobenius() * b.matrix().frobenius();
    if scale == 0.0 {
        return true;
    }
    a.matrix().commutator(b.matrix()).frobenius() <= tolerance::COMMUTE * scale
}

pub(crate) fn povms_commute(a: &ProjectivePovm, b: &ProjectivePovm) -> bool {
    a.elements()
        .iter()
        .all(|ma| b.elements().iter().all(|mb| operators_commute(ma, mb)))
}

/// Simultaneously diagonalizes a family of mutually commuting projective
/// measurements.
///
/// Works by block refinement: the first measurement splits the space into its
/// eigenspaces, and each later measurement is diagonalized inside every block
/// produced so far. The outcome of measurement `j` on basis vector `k` is the
/// unique element with weight ≈ 1 on that vector.
pub fn simultaneous_eigenbasis(family: &[ProjectivePovm]) -> Result<SharedEigenbasis> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty measurement family".into()))?;
    let d = first.dim();
    for m in family {
        if m.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if !povms_commute(&family[i], &family[j]) {
                return Err(Error::Incompatible(i, j));
            }
        }
    }

    let mut blocks: Vec<DMatrix<Complex64>> = vec![DMatrix::identity(d, d)];
    for m in family {
        let label_observable = label_observable(m);
        let mut refined = Vec::with_capacity(blocks.len());
        for v in &blocks {
            refined.extend(split_block(v, &label_observable)?);
        }
        blocks = refined;
    }

    let mut basis = DMatrix::zeros(d, d);
    let mut col = 0;
    for block in &blocks {
        for c in 0..block.ncols() {
            let mut v = block.column(c).into_owned();
            fix_phase(v.as_mut_slice());
            basis.set_column(col, &v);
            col += 1;
        }
    }
    let basis = ComplexMatrix::new(basis)?;

    let mut outcome_table = vec![vec![0; family.len()]; d];
    for (j, m) in family.iter().enumerate() {
        let weights: Vec<Vec<f64>> = m.elements().iter().map(|e| e.matrix().diagonal_in(&basis)).collect();
        for (k, row) in outcome_table.iter_mut().enumerate() {
            let mut hit = None;
            for (y, w) in weights.iter().enumerate() {
                let w = w[k];
                if (w - 1.0).abs() <= tolerance::DIAGONAL {
                    if hit.is_some() {
                        return Err(Error::AmbiguousOutcome { basis: k, weight: w });
                    }
                    hit = Some(y);
                } else if w.abs() > tolerance::DIAGONAL {
                    return Err(Error::AmbiguousOutcome { basis: k, weight: w });
                }
            }
            row[j] = hit.ok_or(Error::AmbiguousOutcome { basis: k, weight: 0.0 })?;
        }

        let u_adj = basis.adjoint();
        for e in m.elements() {
            let rotated = &(&u_adj * e.matrix()) * &basis;
            let off = rotated.off_diagonal_norm();
            if off > tolerance::DIAGONAL * e.matrix().frobenius().max(1.0) {
                return Err(Error::AmbiguousOutcome { basis: 0, weight: off });
            }
        }
    }

    Ok(SharedEigenbasis { basis, outcome_table })
}

/// `Σ_y y M_y`: distinct integer eigenvalue per outcome.
fn label_observable(m: &ProjectivePovm) -> DMatrix<Complex64> {
    let d = m.dim();
    let mut acc = DMatrix::zeros(d, d);
    for (y, e) in m.elements().iter().enumerate() {
        acc += e.matrix().inner() * Complex64::new(y as f64, 0.0);
    }
    acc
}

/// Splits the subspace spanned by the columns of `v` into eigenspaces of the
/// observable compressed onto it, ordered by eigenvalue.
fn split_block(v: &DMatrix<Complex64>, observable: &DMatrix<Complex64>) -> Result<Vec<DMatrix<Complex64>>> {
    let compressed = v.adjoint() * observable * v;
    let eig = eig_hermitian_matrix(&ComplexMatrix::new(compressed)?)?;
    let k = v.ncols();
    let mut groups: Vec<(i64, Vec<usize>)> = Vec::new();
    for (c, &lambda) in eig.values.iter().enumerate() {
        let level = lambda.round();
        if (lambda - level).abs() > CLUSTER_TOL {
            return Err(Error::AmbiguousOutcome {
                basis: c,
                weight: lambda,
            });
        }
        let level = level as i64;
        match groups.last_mut() {
            Some((l, cols)) if *l == level => cols.push(c),
            _ => groups.push((level, vec![c])),
        }
    }
    let w = eig.vectors.inner();
    Ok(groups
        .into_iter()
        .map(|(_, cols)| {
            let sub = DMatrix::from_fn(k, cols.len(), |r, c| w[(r, cols[c])]);
            v * sub
        })
        .collect())
}

/// Rotates the global phase so the first dominant component is real positive.
fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().find(|z| z.norm() > 0.5 * max).copied().unwrap_or_default();
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}
