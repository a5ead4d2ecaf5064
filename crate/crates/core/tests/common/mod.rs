#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use qpac::concept::{ConceptClass, LossFunction, Predictor};
use qpac::env::{haar_unitary, Environment};
use qpac::quantum::{c64, Complex64, ComplexMatrix, DensityOperator, HermitianOperator, ProjectivePovm};

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im)
    })
}

/// `G G† / tr(G G†)` for a `d × r` complex Gaussian `G`, rank `r` drawn from `1..=d`.
pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityOperator {
    let r = rng.random_range(1..=d);
    let g = gaussian(d, r, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.map(|z| z / tr);
    // Round-off leaves ~1e-17 anti-Hermitian noise; keep the Hermitian part.
    let m = (&m + m.adjoint()).map(|z| z * 0.5);
    DensityOperator::from_matrix(ComplexMatrix::new(m).unwrap()).unwrap()
}

pub fn random_pure(d: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = gaussian(d, 1, rng);
    DensityOperator::pure(g.as_slice()).unwrap()
}

/// Probability table with every cell drawn uniformly and normalized.
pub fn random_dist(nx: usize, ny: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let raw: Vec<Vec<f64>> = (0..nx)
        .map(|_| (0..ny).map(|_| rng.random::<f64>()).collect())
        .collect();
    let total: f64 = raw.iter().flatten().sum();
    raw.into_iter()
        .map(|r| r.into_iter().map(|v| v / total).collect())
        .collect()
}

pub fn labels(ny: usize) -> Vec<String> {
    (0..ny).map(|y| y.to_string()).collect()
}

pub fn random_environment(d: usize, nx: usize, ny: usize, rng: &mut impl Rng) -> Environment {
    let states = (0..nx).map(|_| random_density(d, rng)).collect();
    let features = (0..nx).map(|x| format!("x{x}")).collect();
    Environment::new(features, labels(ny), states, random_dist(nx, ny, rng)).unwrap()
}

/// Loss table with values on the grid {0, 1/2, 1} and zero on the diagonal.
pub fn random_loss(ny: usize, rng: &mut impl Rng) -> LossFunction {
    let table = (0..ny)
        .map(|y| {
            (0..ny)
                .map(|p| {
                    if p == y {
                        0.0
                    } else {
                        rng.random_range(0..=2) as f64 / 2.0
                    }
                })
                .collect()
        })
        .collect();
    LossFunction::new(labels(ny), table).unwrap()
}

/// Projective predictor from a basis and a random assignment of basis vectors
/// to labels (some labels may receive none).
pub fn predictor_in_basis(id: usize, basis: &ComplexMatrix, ny: usize, rng: &mut impl Rng) -> Predictor {
    let assignment: Vec<usize> = (0..basis.rows()).map(|_| rng.random_range(0..ny)).collect();
    Predictor::new(id, ProjectivePovm::from_basis(basis, &assignment, labels(ny)).unwrap())
}

/// Compatible class: `k` predictors diagonal in one Haar basis.
pub fn compatible_class(d: usize, ny: usize, k: usize, rng: &mut impl Rng) -> ConceptClass {
    let basis = haar_unitary(d, rng);
    let predictors = (0..k).map(|id| predictor_in_basis(id, &basis, ny, rng)).collect();
    ConceptClass::new(labels(ny), predictors).unwrap()
}

/// `U R` where `R` applies a Haar 2×2 unitary to columns `offset` and
/// `offset + 1` and leaves the rest alone.
pub fn rotate_pair(u: &ComplexMatrix, offset: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let d = u.rows();
    let v = haar_unitary(2, rng);
    let mut r = DMatrix::identity(d, d);
    r.view_mut((offset, offset), (2, 2)).copy_from(v.inner());
    ComplexMatrix::new(u.inner() * r).unwrap()
}

/// Class whose compatibility relation is generally not transitive.
///
/// Predictors come from the bases `U`, `U (V ⊕ I)` and `U (I ⊕ W)` on
/// `d = 4`. A predictor that is constant on a rotated pair of basis vectors
/// is also diagonal in the neighbouring basis, so it commutes with
/// predictors from more than one basis, while fine predictors from
/// different bases do not commute.
pub fn overlapping_class(k: usize, rng: &mut impl Rng) -> ConceptClass {
    let u = haar_unitary(4, rng);
    let bases = [u.clone(), rotate_pair(&u, 0, rng), rotate_pair(&u, 2, rng)];
    let predictors = (0..k)
        .map(|id| {
            let which = rng.random_range(0..bases.len());
            let mut assignment: Vec<usize> = (0..4).map(|_| rng.random_range(0..2)).collect();
            if rng.random_bool(0.5) {
                if which != 2 {
                    assignment[1] = assignment[0];
                }
                if which != 1 {
                    assignment[3] = assignment[2];
                }
            }
            Predictor::new(
                id,
                ProjectivePovm::from_basis(&bases[which], &assignment, labels(2)).unwrap(),
            )
        })
        .collect();
    ConceptClass::new(labels(2), predictors).unwrap()
}

/// `Σ_{(y, ŷ): ℓ(y, ŷ) = z} M_ŷ ⊗ |y⟩⟨y|`, built directly from the definition.
pub fn loss_operator(p: &Predictor, loss: &LossFunction, z: f64) -> ComplexMatrix {
    let d = p.dim();
    let ny = loss.labels().len();
    let mut acc = ComplexMatrix::zeros(d * ny, d * ny);
    for y in 0..ny {
        for (yhat, m) in p.povm.elements().iter().enumerate() {
            if loss.value(y, yhat) == z {
                acc = &acc + &m.matrix().kron(&ComplexMatrix::basis_projector(ny, y));
            }
        }
    }
    acc
}

pub fn hermitian(m: ComplexMatrix) -> HermitianOperator {
    HermitianOperator::new(m).unwrap()
}

/// Born distribution over loss vectors from explicit operator products
/// `∏_j L^{(j)}_{z_j}` on `H_X ⊗ H_Y`, keyed by image indices.
pub fn product_operator_distribution(
    predictors: &[&Predictor],
    loss: &LossFunction,
    rho: &DensityOperator,
    y: usize,
) -> BTreeMap<Vec<usize>, f64> {
    let ny = loss.labels().len();
    let joint = rho.matrix().kron(&ComplexMatrix::basis_projector(ny, y));
    let image = loss.image();
    let ops: Vec<Vec<ComplexMatrix>> = predictors
        .iter()
        .map(|p| image.iter().map(|&z| loss_operator(p, loss, z)).collect())
        .collect();
    let mut out = BTreeMap::new();
    let k = predictors.len();
    let mut z = vec![0usize; k];
    loop {
        let mut prod = ops[0][z[0]].clone();
        for j in 1..k {
            prod = &prod * &ops[j][z[j]];
        }
        let p = prod.trace_product(&joint).re;
        if p.abs() > 1e-15 {
            out.insert(z.clone(), p);
        }
        // Odometer over Z^k.
        let mut i = 0;
        while i < k {
            z[i] += 1;
            if z[i] < image.len() {
                break;
            }
            z[i] = 0;
            i += 1;
        }
        if i == k {
            return out;
        }
    }
}
