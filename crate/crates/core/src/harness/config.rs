//! Experiment configuration: one JSON document per experiment.
//!
//! ```json
//! {
//!   "class": {"random": {"dim": 4, "labels": 2, "k": 8, "structure": "shared_basis"}},
//!   "environment": {"realizable": {"target": 0}},
//!   "loss": {"type": "zero_one"},
//!   "epsilon": [0.2], "delta": [0.1],
//!   "trials": 200, "seed": 7, "strategy": "best", "mode": "complexity"
//! }
//! ```
//!
//! Manifest paths are resolved relative to the directory holding the config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::manifest::{ClassManifest, EnvironmentManifest, LossConfig};
use super::HarnessError;
use crate::concept::{ConceptClass, GreedyOrder, LossFunction, PartitionOptions, Predictor};
use crate::env::{
    bloch_spin_preset, classical_embed, random_class, realizable_environment, BlochGrid, ClassStructure, Environment,
};
use crate::qerm::{BatchMode, PartitionStrategy};
use crate::quantum::json::{labels, OperatorJson, PovmJson};
use crate::quantum::ProjectivePovm;
use crate::{rng, Error};

/// Random stream reserved for building the scenario, distinct from the
/// per-trial streams `seed + trial`.
const SCENARIO_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelSet {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSource {
    Random {
        dim: usize,
        labels: LabelSet,
        k: usize,
        structure: ClassStructure,
    },
    Manifest(PathBuf),
    /// The functions of the `classical` section, embedded as diagonal measurements.
    Classical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentSource {
    /// Eigenbasis of the predictor at position `target`, labeled by its outcomes.
    Realizable {
        #[serde(default)]
        target: usize,
    },
    BlochSpin {
        #[serde(default = "default_grid")]
        n_theta: usize,
        #[serde(default = "default_grid")]
        n_phi: usize,
        #[serde(default = "default_orthant")]
        orthant: [i8; 3],
    },
    Manifest(PathBuf),
    /// Orthogonal basis states with the distribution of the `classical` section.
    Classical,
}

fn default_grid() -> usize {
    20
}

fn default_orthant() -> [i8; 3] {
    [1, 1, 1]
}

/// Classical problem `(X, Y, D, {f})` for the embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalProblem {
    #[serde(deserialize_with = "labels")]
    pub features: Vec<String>,
    #[serde(deserialize_with = "labels")]
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    /// `functions[i][x]`: label index that function `i` assigns to feature `x`.
    pub functions: Vec<Vec<usize>>,
}

impl ClassicalProblem {
    pub fn embed(&self) -> crate::Result<(Environment, ConceptClass)> {
        classical_embed(
            self.features.clone(),
            self.labels.clone(),
            self.dist.clone(),
            &self.functions,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    #[default]
    Complexity,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    pub values: Vec<f64>,
    pub povm: PovmJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub weights: Vec<f64>,
    pub states: Vec<OperatorJson>,
}

/// Concentration sweep. Without an observable and source the default is the
/// computational-basis 0/1 observable on `|+⟩⟨+|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationConfig {
    pub n: Vec<usize>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub observable: Option<ObservableConfig>,
    #[serde(default)]
    pub source: Option<SourceConfig>,
    /// Also measure the maximal deviation over compatible subclasses of the
    /// configured class.
    #[serde(default = "yes")]
    pub uniform: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub class: Option<ClassSource>,
    #[serde(default)]
    pub environment: Option<EnvironmentSource>,
    #[serde(default)]
    pub loss: Option<LossConfig>,
    #[serde(default)]
    pub classical: Option<ClassicalProblem>,
    #[serde(default = "default_epsilon")]
    pub epsilon: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_strategy")]
    pub strategy: PartitionStrategy,
    /// Visiting order of the greedy partitioner.
    #[serde(default)]
    pub greedy_order: GreedyOrder,
    #[serde(default)]
    pub mode: ModeKind,
    /// Total sample budgets swept in budget mode.
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub concentration: Option<ConcentrationConfig>,
}

fn default_epsilon() -> Vec<f64> {
    vec![0.2]
}

fn default_delta() -> Vec<f64> {
    vec![0.1]
}

fn default_trials() -> usize {
    1
}

fn default_strategy() -> PartitionStrategy {
    PartitionStrategy::Best
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// Concept class, optional environment and loss an experiment runs on.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub class: ConceptClass,
    pub env: Option<Environment>,
    pub loss: LossFunction,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_json(&super::read_file(path)?)
    }

    /// Grid and count checks: grids nonempty, `ε, δ ∈ (0, 1)`, `trials ≥ 1`.
    pub fn check(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.epsilon.is_empty() || self.delta.is_empty() {
            return bad("epsilon and delta grids must be nonempty".into());
        }
        for &e in &self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return bad(format!("epsilon {e} not in (0, 1)"));
            }
        }
        for &d in &self.delta {
            if !(d > 0.0 && d < 1.0) {
                return bad(format!("delta {d} not in (0, 1)"));
            }
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.mode == ModeKind::Budget && self.n.is_empty() {
            return bad("budget mode needs a nonempty n grid".into());
        }
        if let Some(c) = &self.concentration {
            if c.n.is_empty() || c.n.contains(&0) {
                return bad("concentration n grid must be nonempty and positive".into());
            }
            if c.trials == Some(0) {
                return bad("concentration trials must be at least 1".into());
            }
        }
        Ok(())
    }

    /// Batch modes swept by this config.
    pub fn modes(&self) -> Vec<BatchMode> {
        match self.mode {
            ModeKind::Complexity => vec![BatchMode::Complexity],
            ModeKind::Budget => self.n.iter().map(|&n| BatchMode::Budget(n)).collect(),
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn partition_options(&self) -> PartitionOptions {
        PartitionOptions {
            greedy_order: self.greedy_order,
            ..PartitionOptions::default()
        }
    }

    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Builds the class, environment and loss. Relative manifest paths are
    /// resolved against `base`.
    pub fn scenario(&self, base: &Path) -> Result<Scenario, HarnessError> {
        let source = self
            .class
            .as_ref()
            .ok_or_else(|| HarnessError::Config("config has no class".into()))?;
        let mut stream = rng::split(self.seed, SCENARIO_STREAM);

        let mut env = match &self.environment {
            Some(EnvironmentSource::BlochSpin {
                n_theta,
                n_phi,
                orthant,
            }) => {
                if *n_theta > 20 || *n_phi > 20 || *n_theta == 0 || *n_phi == 0 {
                    return Err(HarnessError::Config("Bloch grid must be between 1x1 and 20x20".into()));
                }
                Some(bloch_spin_preset(
                    BlochGrid {
                        n_theta: *n_theta,
                        n_phi: *n_phi,
                    },
                    *orthant,
                )?)
            }
            Some(EnvironmentSource::Manifest(path)) => {
                let text = super::read_file(&base.join(path))?;
                let m: EnvironmentManifest =
                    serde_json::from_str(&text).map_err(|e| HarnessError::Parse(e.to_string()))?;
                Some(m.to_env()?)
            }
            _ => None,
        };

        let mut manifest_loss = None;
        let class = match source {
            ClassSource::Random {
                dim,
                labels,
                k,
                structure,
            } => {
                let count = match labels {
                    LabelSet::Count(c) => *c,
                    LabelSet::Names(n) => n.len(),
                };
                let class = random_class(*dim, count, *k, *structure, &mut stream)?;
                match (labels, &env) {
                    (LabelSet::Names(names), _) => relabel(&class, names.clone())?,
                    (LabelSet::Count(c), Some(e)) if e.labels().len() == *c => relabel(&class, e.labels().to_vec())?,
                    _ => class,
                }
            }
            ClassSource::Manifest(path) => {
                let text = super::read_file(&base.join(path))?;
                let m: ClassManifest = serde_json::from_str(&text).map_err(|e| HarnessError::Parse(e.to_string()))?;
                manifest_loss = m.loss.clone();
                m.to_class()?
            }
            ClassSource::Classical => self.classical()?.embed()?.1,
        };

        match &self.environment {
            Some(EnvironmentSource::Realizable { target }) => env = Some(realizable_environment(&class, *target)?),
            Some(EnvironmentSource::Classical) => env = Some(self.classical()?.embed()?.0),
            _ => {}
        }
        if let Some(e) = &env {
            if e.labels() != class.labels() {
                return Err(Error::AlphabetMismatch.into());
            }
            if e.dim() != class.dim() {
                return Err(Error::DimensionMismatch {
                    expected: class.dim(),
                    found: e.dim(),
                }
                .into());
            }
        }
        let loss = self
            .loss
            .clone()
            .or(manifest_loss)
            .unwrap_or_else(LossConfig::zero_one)
            .build(class.labels())?;
        Ok(Scenario { class, env, loss })
    }

    pub fn classical(&self) -> Result<&ClassicalProblem, HarnessError> {
        self.classical
            .as_ref()
            .ok_or_else(|| HarnessError::Config("config has no classical section".into()))
    }
}

/// Same measurements with outcome labels renamed position by position.
fn relabel(class: &ConceptClass, names: Vec<String>) -> Result<ConceptClass, HarnessError> {
    if names.len() != class.labels().len() {
        return Err(HarnessError::Config(format!(
            "{} label names for {} labels",
            names.len(),
            class.labels().len()
        )));
    }
    let predictors = class
        .predictors()
        .iter()
        .map(|p| {
            Ok(Predictor::new(
                p.id,
                ProjectivePovm::from_elements(names.clone(), p.povm.elements().to_vec())?,
            ))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(ConceptClass::new(names, predictors)?)
}
