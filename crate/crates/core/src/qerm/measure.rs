use std::collections::BTreeMap;

use rand::Rng;

use super::TrainingSample;
use crate::concept::LossFunction;
use crate::quantum::{clamp_distribution, sample_index, DensityOperator, SharedEigenbasis};
use crate::{Error, Result};

/// Born probabilities `⟨u_k| ρ |u_k⟩` of the shared basis vectors.
pub fn basis_probabilities(basis: &SharedEigenbasis, rho: &DensityOperator) -> Result<Vec<f64>> {
    if basis.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: rho.dim(),
        });
    }
    clamp_distribution(rho.matrix().diagonal_in(&basis.basis))
}

/// Joint loss measurement of a compatible subclass on one sample.
///
/// Samples a basis vector `k` of the shared eigenbasis (tensored with the
/// label basis, which the sample's label fixes) and reads off
/// `z_j = ℓ(y, outcome_table[k][j])` for every predictor `j` of the subclass.
/// The sample is consumed.
pub fn measure_subclass<R: Rng + ?Sized>(
    basis: &SharedEigenbasis,
    sample: &mut TrainingSample,
    loss: &LossFunction,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if sample.is_consumed() {
        return Err(Error::SampleConsumed(sample.id));
    }
    let probs = basis_probabilities(basis, sample.state())?;
    measure_with_probabilities(basis, &probs, sample, loss, rng)
}

/// [`measure_subclass`] with the basis probabilities of the sample's state
/// already computed.
pub fn measure_with_probabilities<R: Rng + ?Sized>(
    basis: &SharedEigenbasis,
    probs: &[f64],
    sample: &mut TrainingSample,
    loss: &LossFunction,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if sample.y >= loss.labels().len() {
        return Err(Error::AlphabetMismatch);
    }
    sample.consume()?;
    let k = sample_index(probs, rng);
    Ok(basis.outcome_table[k]
        .iter()
        .map(|&yh| loss.value(sample.y, yh))
        .collect())
}

/// Exact distribution of the loss vector produced by [`measure_subclass`] on
/// `ρ_x ⊗ |y⟩⟨y|`, keyed by positions in the loss image.
pub fn joint_loss_distribution(
    basis: &SharedEigenbasis,
    rho: &DensityOperator,
    y: usize,
    loss: &LossFunction,
) -> Result<BTreeMap<Vec<usize>, f64>> {
    let probs = basis_probabilities(basis, rho)?;
    let mut dist = BTreeMap::new();
    for (k, p) in probs.into_iter().enumerate() {
        let key: Vec<usize> = basis.outcome_table[k]
            .iter()
            .map(|&yh| loss.image_index(y, yh))
            .collect();
        *dist.entry(key).or_insert(0.0) += p;
    }
    Ok(dist)
}
