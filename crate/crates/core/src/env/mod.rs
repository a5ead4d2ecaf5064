//! Synthetic environments: feature states, sampling distributions and
//! concept-class factories.

mod bloch;
mod embed;
mod random;

use std::sync::Arc;

use rand::Rng;

pub use bloch::{bloch_spin_preset, bloch_spin_preset_with, bloch_state, bloch_vector, orthant_rule, BlochGrid};
pub use embed::{classical_embed, classical_risk};
pub use random::{haar_unitary, random_class, realizable_environment, ClassStructure};

use crate::qerm::TrainingSample;
use crate::quantum::{sample_index, ComplexMatrix, DensityOperator};
use crate::{tolerance, Error, Result};

/// Feature states `ρ_x` with a joint distribution `D(x, y)` over features
/// and labels.
#[derive(Clone, Debug)]
pub struct Environment {
    features: Vec<String>,
    labels: Vec<String>,
    states: Vec<Arc<DensityOperator>>,
    dist: Vec<Vec<f64>>,
    dim: usize,
}

impl Environment {
    /// `dist[x][y]` is `D(x, y)`.
    pub fn new(
        features: Vec<String>,
        labels: Vec<String>,
        states: Vec<DensityOperator>,
        dist: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let dim = states
            .first()
            .ok_or_else(|| Error::InvalidDistribution("no feature states".into()))?
            .dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if features.len() != states.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} feature names for {} states",
                features.len(),
                states.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::InvalidDistribution("empty label alphabet".into()));
        }
        if dist.len() != states.len() || dist.iter().any(|row| row.len() != labels.len()) {
            return Err(Error::InvalidDistribution(format!(
                "table must be {}x{}",
                states.len(),
                labels.len()
            )));
        }
        if let Some(bad) = dist.iter().flatten().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {bad}")));
        }
        let total: f64 = dist.iter().flatten().sum();
        if (total - 1.0).abs() > tolerance::PROBABILITY {
            return Err(Error::InvalidDistribution(format!("mass {total}")));
        }
        Ok(Self {
            features,
            labels,
            states: states.into_iter().map(Arc::new).collect(),
            dist,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[Arc<DensityOperator>] {
        &self.states
    }

    pub fn dist(&self) -> &[Vec<f64>] {
        &self.dist
    }

    /// Average sample state `Σ D(x,y) ρ_x ⊗ |y⟩⟨y|` on `H_X ⊗ H_Y`.
    pub fn average_state(&self) -> Result<DensityOperator> {
        average_state(self)
    }
}

pub fn average_state(env: &Environment) -> Result<DensityOperator> {
    let ny = env.labels.len();
    let big = env.dim * ny;
    if big > tolerance::MAX_DIM {
        return Err(Error::DimensionOverflow {
            dim: big,
            max: tolerance::MAX_DIM,
        });
    }
    let mut acc = ComplexMatrix::zeros(big, big);
    for (x, rho) in env.states.iter().enumerate() {
        for (y, &p) in env.dist[x].iter().enumerate() {
            if p > 0.0 {
                let term = rho.matrix().kron(&ComplexMatrix::basis_projector(ny, y));
                acc = &acc + &term.scale(p);
            }
        }
    }
    DensityOperator::from_matrix(acc)
}

/// `n` iid samples `(x_i, y_i) ~ D`, each wrapped as an unmeasured sample.
pub fn draw_samples<R: Rng + ?Sized>(env: &Environment, n: usize, rng: &mut R) -> Result<Vec<TrainingSample>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let ny = env.labels.len();
    let flat: Vec<f64> = env.dist.iter().flatten().copied().collect();
    let total: f64 = flat.iter().sum();
    let probs: Vec<f64> = flat.iter().map(|p| p / total).collect();
    Ok((0..n)
        .map(|i| {
            let cell = sample_index(&probs, rng);
            let (x, y) = (cell / ny, cell % ny);
            TrainingSample::new(x, y, Arc::clone(&env.states[x])).with_id(i)
        })
        .collect())
}
