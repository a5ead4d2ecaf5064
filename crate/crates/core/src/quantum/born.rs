use rand::Rng;

use super::{DensityOperator, Povm};
use crate::{tolerance, Error, Result};

/// Born probabilities `Re tr(M_v ρ)` for every outcome of `m`.
pub fn born_distribution(m: &Povm, rho: &DensityOperator) -> Result<Vec<f64>> {
    if m.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: rho.dim(),
        });
    }
    let raw: Vec<f64> = m.elements().iter().map(|e| e.expectation(rho)).collect();
    clamp_distribution(raw)
}

/// Cleans a vector of raw probabilities.
///
/// Entries in `[-tol, 0)` become 0, entries in `(1, 1 + tol]` become 1, and
/// the result is renormalized. Larger violations, or a total mass off by
/// more than `tolerance::PROBABILITY`, are errors.
pub fn clamp_distribution(mut raw: Vec<f64>) -> Result<Vec<f64>> {
    for p in raw.iter_mut() {
        if !p.is_finite() || *p < -tolerance::PROBABILITY || *p > 1.0 + tolerance::PROBABILITY {
            return Err(Error::InvalidProbability(format!("{p}")));
        }
        *p = p.clamp(0.0, 1.0);
    }
    let total: f64 = raw.iter().sum();
    if (total - 1.0).abs() > tolerance::PROBABILITY {
        return Err(Error::InvalidProbability(format!("mass {total}")));
    }
    for p in raw.iter_mut() {
        *p /= total;
    }
    Ok(raw)
}

/// Draws an index from a normalized probability vector by inverse CDF.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = k;
            acc += p;
            if u < acc {
                return k;
            }
        }
    }
    last_nonzero
}

/// Samples one outcome index of `m` on state `rho`.
pub fn born_sample<R: Rng + ?Sized>(m: &Povm, rho: &DensityOperator, rng: &mut R) -> Result<usize> {
    let probs = born_distribution(m, rho)?;
    Ok(sample_index(&probs, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{c64, DensityOperator};
    use crate::rng;

    fn plus() -> DensityOperator {
        DensityOperator::pure(&[c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn trivial_povm_gives_certainty() {
        let p = born_distribution(&Povm::trivial(2, "only"), &plus()).unwrap();
        assert_eq!(p, vec![1.0]);
        let mut r = rng::seeded(11);
        for _ in 0..10 {
            assert_eq!(born_sample(&Povm::trivial(2, "only"), &plus(), &mut r).unwrap(), 0);
        }
    }

    #[test]
    fn plus_state_in_computational_basis() {
        // |<0|+>|^2 = 1/2
        let p = born_distribution(&Povm::computational_basis(2), &plus()).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eigenstate_is_deterministic() {
        let zero = DensityOperator::basis(2, 0);
        assert_eq!(
            born_distribution(&Povm::computational_basis(2), &zero).unwrap(),
            vec![1.0, 0.0]
        );
        for seed in 0..50 {
            let mut r = rng::seeded(seed);
            assert_eq!(born_sample(&Povm::computational_basis(2), &zero, &mut r).unwrap(), 0);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = DensityOperator::maximally_mixed(3);
        assert_eq!(
            born_distribution(&Povm::computational_basis(2), &rho),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn clamping_policy() {
        let p = clamp_distribution(vec![-5e-10, 1.0 + 5e-10]).unwrap();
        assert_eq!(p[0], 0.0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(clamp_distribution(vec![-1e-6, 1.0 + 1e-6]).is_err());
        assert!(clamp_distribution(vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn plus_state_frequencies_within_three_sigma() {
        let n = 100_000;
        let mut r = rng::seeded(2024);
        let m = Povm::computational_basis(2);
        let rho = plus();
        let zeros = (0..n).filter(|_| born_sample(&m, &rho, &mut r).unwrap() == 0).count();
        let freq = zeros as f64 / n as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((freq - 0.5).abs() <= 3.0 * sigma, "freq {freq}");
    }
}
