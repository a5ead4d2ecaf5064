use super::{LossFunction, Predictor};
use crate::quantum::{ComplexMatrix, DensityOperator, HermitianOperator, Povm};
use crate::{Error, Result};

/// Loss-value measurement of one predictor on the feature-label space.
///
/// Operator `z` is `Σ_{(y, ŷ): ℓ(y, ŷ) = z} M_ŷ ⊗ |y⟩⟨y|`, acting on
/// `H_X ⊗ H_Y` with the feature factor outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct LossObservable {
    pub predictor_id: usize,
    /// Loss value of each outcome, sorted ascending.
    pub values: Vec<f64>,
    pub povm: Povm,
}

impl LossObservable {
    /// `Σ_z z tr(L_z ρ)`.
    pub fn expectation(&self, rho: &DensityOperator) -> Result<f64> {
        if rho.dim() != self.povm.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.povm.dim(),
                found: rho.dim(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(self.povm.elements())
            .map(|(z, op)| z * op.expectation(rho))
            .sum())
    }
}

pub fn loss_observable(p: &Predictor, loss: &LossFunction) -> Result<LossObservable> {
    if p.povm.outcomes() != loss.labels() {
        return Err(Error::AlphabetMismatch);
    }
    let d = p.dim();
    let ny = loss.labels().len();
    let big = d * ny;
    let mut ops = vec![ComplexMatrix::zeros(big, big); loss.image().len()];
    for y in 0..ny {
        let label_proj = ComplexMatrix::basis_projector(ny, y);
        for (yh, m) in p.povm.elements().iter().enumerate() {
            let z = loss.image_index(y, yh);
            ops[z] = &ops[z] + &m.matrix().kron(&label_proj);
        }
    }
    let elements = ops
        .into_iter()
        .map(HermitianOperator::new)
        .collect::<Result<Vec<_>>>()?;
    let outcomes = loss.image().iter().map(|z| z.to_string()).collect();
    Ok(LossObservable {
        predictor_id: p.id,
        values: loss.image().to_vec(),
        povm: Povm::new(outcomes, elements)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::ProjectivePovm;

    fn bits() -> Vec<String> {
        vec!["0".into(), "1".into()]
    }

    #[test]
    fn zero_one_qubit_expansion() {
        // L_0 = |0><0| ⊗ |0><0| + |1><1| ⊗ |1><1| = diag(1,0,0,1), L_1 = diag(0,1,1,0)
        let p = Predictor::new(0, ProjectivePovm::computational_basis(2));
        let obs = loss_observable(&p, &LossFunction::zero_one(bits()).unwrap()).unwrap();
        assert_eq!(obs.values, vec![0.0, 1.0]);
        assert_eq!(
            obs.povm.element(0).matrix(),
            &ComplexMatrix::from_diagonal(&[1.0, 0.0, 0.0, 1.0])
        );
        assert_eq!(
            obs.povm.element(1).matrix(),
            &ComplexMatrix::from_diagonal(&[0.0, 1.0, 1.0, 0.0])
        );
        for e in obs.povm.elements() {
            assert!(e.projectivity_residual() < 1e-15);
        }
    }

    #[test]
    fn constant_loss_gives_identity() {
        let p = Predictor::new(3, ProjectivePovm::computational_basis(2));
        let loss = LossFunction::new(bits(), vec![vec![0.0; 2]; 2]).unwrap();
        let obs = loss_observable(&p, &loss).unwrap();
        assert_eq!(obs.povm.len(), 1);
        assert_eq!(obs.povm.element(0).matrix(), &ComplexMatrix::identity(4));
    }

    #[test]
    fn alphabet_mismatch() {
        let p = Predictor::new(0, ProjectivePovm::computational_basis(2));
        let loss = LossFunction::zero_one(vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(loss_observable(&p, &loss), Err(Error::AlphabetMismatch));
    }
}
