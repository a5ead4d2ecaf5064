use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Environment;
use crate::concept::{ConceptClass, Predictor};
use crate::quantum::{c64, simultaneous_eigenbasis, Complex64, ComplexMatrix, DensityOperator, ProjectivePovm};
use crate::{Error, Result};

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::new(q).expect("finite unitary")
}

/// Shape of a generated concept class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassStructure {
    /// Every predictor diagonal in one random basis.
    SharedBasis,
    /// `m` contiguous groups, each sharing its own random basis.
    Blocks(usize),
    /// Every predictor in its own random basis.
    HaarRandom,
}

/// Random outcome per basis vector, using at least two distinct outcomes
/// whenever `d ≥ 2` and there are at least two labels, so no predictor is
/// the trivial `{I, 0, ...}` measurement.
fn random_assignment<R: Rng + ?Sized>(d: usize, labels: usize, rng: &mut R) -> Vec<usize> {
    let needed = d.min(labels).min(2);
    loop {
        let a: Vec<usize> = (0..d).map(|_| rng.random_range(0..labels)).collect();
        let mut distinct = a.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() >= needed {
            return a;
        }
    }
}

/// Random class of `k` projective predictors on dimension `d` over labels
/// `"0".."labels-1"`; predictor ids are `0..k`.
pub fn random_class<R: Rng + ?Sized>(
    d: usize,
    labels: usize,
    k: usize,
    structure: ClassStructure,
    rng: &mut R,
) -> Result<ConceptClass> {
    if d == 0 || labels == 0 || k == 0 {
        return Err(Error::InvalidParameter("d, labels and k must be positive".into()));
    }
    let names: Vec<String> = (0..labels).map(|y| y.to_string()).collect();
    let group_of: Vec<usize> = match structure {
        ClassStructure::SharedBasis => vec![0; k],
        ClassStructure::HaarRandom => (0..k).collect(),
        ClassStructure::Blocks(m) => {
            if m == 0 || m > k {
                return Err(Error::InvalidParameter(format!("blocks({m}) needs 1 <= m <= k = {k}")));
            }
            let (base, extra) = (k / m, k % m);
            (0..m)
                .flat_map(|g| std::iter::repeat_n(g, base + usize::from(g < extra)))
                .collect()
        }
    };
    let groups = group_of.iter().max().map_or(0, |g| g + 1);
    let bases: Vec<ComplexMatrix> = (0..groups).map(|_| haar_unitary(d, rng)).collect();
    let predictors = group_of
        .iter()
        .enumerate()
        .map(|(id, &g)| {
            let assignment = random_assignment(d, labels, rng);
            Ok(Predictor::new(
                id,
                ProjectivePovm::from_basis(&bases[g], &assignment, names.clone())?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    ConceptClass::new(names, predictors)
}

/// Environment in which the predictor at position `target` has zero 0-1 risk.
///
/// Feature states are the eigenbasis vectors of the target predictor, each
/// labeled with the outcome the target produces on it, uniformly weighted.
pub fn realizable_environment(class: &ConceptClass, target: usize) -> Result<Environment> {
    if target >= class.len() {
        return Err(Error::InvalidParameter(format!("target {target} out of range")));
    }
    let shared = simultaneous_eigenbasis(std::slice::from_ref(&class.predictor(target).povm))?;
    let d = class.dim();
    let ny = class.labels().len();
    let mut features = Vec::with_capacity(d);
    let mut states = Vec::with_capacity(d);
    let mut dist = Vec::with_capacity(d);
    for k in 0..d {
        features.push(format!("u{k}"));
        states.push(DensityOperator::pure(&shared.basis.column(k))?);
        let mut row = vec![0.0; ny];
        row[shared.outcome_table[k][0]] = 1.0 / d as f64;
        dist.push(row);
    }
    Environment::new(features, class.labels().to_vec(), states, dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::{are_compatible, opt_risk, partition_compatible, LossFunction, Strategy};
    use crate::rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut r = rng::seeded(5);
        for d in [1, 2, 5, 8] {
            let u = haar_unitary(d, &mut r);
            assert!((&(&u.adjoint() * &u) - &ComplexMatrix::identity(d)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn shared_basis_is_one_subclass() {
        let mut r = rng::seeded(8);
        let class = random_class(4, 2, 8, ClassStructure::SharedBasis, &mut r).unwrap();
        assert_eq!(partition_compatible(&class, Strategy::Greedy).unwrap().m(), 1);
        assert_eq!(partition_compatible(&class, Strategy::Exact).unwrap().m(), 1);
    }

    #[test]
    fn blocks_recovered_by_exact() {
        let mut r = rng::seeded(9);
        let class = random_class(4, 2, 9, ClassStructure::Blocks(3), &mut r).unwrap();
        let p = partition_compatible(&class, Strategy::Exact).unwrap();
        assert_eq!(p.m(), 3);
        assert_eq!(p.subclasses(), &[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
    }

    #[test]
    fn haar_qubits_pairwise_incompatible() {
        for seed in 0..10 {
            let mut r = rng::seeded(seed);
            let class = random_class(2, 2, 5, ClassStructure::HaarRandom, &mut r).unwrap();
            for i in 0..5 {
                for j in i + 1..5 {
                    assert!(!are_compatible(class.predictor(i), class.predictor(j)).unwrap());
                }
            }
            assert_eq!(partition_compatible(&class, Strategy::Greedy).unwrap().m(), 5);
        }
    }

    #[test]
    fn realizable_target_has_zero_risk() {
        let mut r = rng::seeded(10);
        let class = random_class(4, 3, 6, ClassStructure::Blocks(2), &mut r).unwrap();
        let env = realizable_environment(&class, 4).unwrap();
        let loss = LossFunction::zero_one(class.labels().to_vec()).unwrap();
        let (opt, _) = opt_risk(&class, &env, &loss).unwrap();
        assert!(opt.abs() < 1e-12);
    }

    #[test]
    fn parameter_errors() {
        let mut r = rng::seeded(1);
        assert!(random_class(2, 2, 0, ClassStructure::SharedBasis, &mut r).is_err());
        assert!(random_class(2, 2, 3, ClassStructure::Blocks(4), &mut r).is_err());
    }
}
