//! JSON manifests for concept classes, environments and loss functions.

use serde::{Deserialize, Serialize};

use crate::concept::{ConceptClass, LossFunction, Predictor};
use crate::env::Environment;
use crate::quantum::json::{labels, OperatorJson};
use crate::quantum::{DensityOperator, ProjectivePovm};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LossConfig {
    /// `{"type": "zero_one"}`.
    Named {
        #[serde(rename = "type")]
        kind: String,
    },
    /// `{"table": [[ℓ(y, ŷ)]]}` indexed by true label, then prediction.
    Table { table: Vec<Vec<f64>> },
}

impl LossConfig {
    pub fn zero_one() -> Self {
        LossConfig::Named {
            kind: "zero_one".into(),
        }
    }

    pub fn build(&self, labels: &[String]) -> Result<LossFunction> {
        match self {
            LossConfig::Named { kind } if kind == "zero_one" => LossFunction::zero_one(labels.to_vec()),
            LossConfig::Named { kind } => Err(Error::InvalidLoss(format!("unknown loss type {kind:?}"))),
            LossConfig::Table { table } => LossFunction::new(labels.to_vec(), table.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictorManifest {
    pub id: usize,
    pub elements: Vec<OperatorJson>,
}

/// `{"dim", "labels", "predictors": [{"id", "elements"}], "loss"}`.
///
/// Element `y` of a predictor is the projector for `labels[y]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassManifest {
    pub dim: usize,
    #[serde(deserialize_with = "labels")]
    pub labels: Vec<String>,
    pub predictors: Vec<PredictorManifest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<LossConfig>,
}

impl ClassManifest {
    pub fn from_class(class: &ConceptClass, loss: Option<LossConfig>) -> Self {
        Self {
            dim: class.dim(),
            labels: class.labels().to_vec(),
            predictors: class
                .predictors()
                .iter()
                .map(|p| PredictorManifest {
                    id: p.id,
                    elements: p
                        .povm
                        .elements()
                        .iter()
                        .map(|e| OperatorJson::from_matrix(e.matrix()))
                        .collect(),
                })
                .collect(),
            loss,
        }
    }

    pub fn to_class(&self) -> Result<ConceptClass> {
        let predictors = self
            .predictors
            .iter()
            .map(|p| {
                let elements = p
                    .elements
                    .iter()
                    .map(|e| self.check_dim(e).and_then(|()| e.to_hermitian()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Predictor::new(
                    p.id,
                    ProjectivePovm::from_elements(self.labels.clone(), elements)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        ConceptClass::new(self.labels.clone(), predictors)
    }

    pub fn loss(&self) -> Result<LossFunction> {
        self.loss
            .clone()
            .unwrap_or_else(LossConfig::zero_one)
            .build(&self.labels)
    }

    fn check_dim(&self, op: &OperatorJson) -> Result<()> {
        if op.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: op.dim,
            });
        }
        Ok(())
    }
}

/// `{"dim", "features", "labels", "states": [op], "dist": [[D(x, y)]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentManifest {
    pub dim: usize,
    #[serde(deserialize_with = "labels")]
    pub features: Vec<String>,
    #[serde(deserialize_with = "labels")]
    pub labels: Vec<String>,
    pub states: Vec<OperatorJson>,
    pub dist: Vec<Vec<f64>>,
}

impl EnvironmentManifest {
    pub fn from_env(env: &Environment) -> Self {
        Self {
            dim: env.dim(),
            features: env.features().to_vec(),
            labels: env.labels().to_vec(),
            states: env
                .states()
                .iter()
                .map(|s| OperatorJson::from_matrix(s.matrix()))
                .collect(),
            dist: env.dist().to_vec(),
        }
    }

    pub fn to_env(&self) -> Result<Environment> {
        let states = self
            .states
            .iter()
            .map(|s| {
                if s.dim != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: s.dim,
                    });
                }
                DensityOperator::from_matrix(s.to_matrix()?)
            })
            .collect::<Result<Vec<_>>>()?;
        Environment::new(self.features.clone(), self.labels.clone(), states, self.dist.clone())
    }
}

/// `{"m", "subclasses": [[ids]], "strategy", "objective"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionExport {
    pub m: usize,
    pub subclasses: Vec<Vec<usize>>,
    pub strategy: String,
    pub objective: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{random_class, realizable_environment, ClassStructure};
    use crate::rng;

    #[test]
    fn class_round_trip() {
        let class = random_class(3, 2, 4, ClassStructure::Blocks(2), &mut rng::seeded(2)).unwrap();
        let manifest = ClassManifest::from_class(&class, Some(LossConfig::zero_one()));
        let text = serde_json::to_string(&manifest).unwrap();
        let back: ClassManifest = serde_json::from_str(&text).unwrap();
        let rebuilt = back.to_class().unwrap();
        assert_eq!(rebuilt.len(), 4);
        for (a, b) in class.predictors().iter().zip(rebuilt.predictors()) {
            assert_eq!(a.id, b.id);
            for (x, y) in a.povm.elements().iter().zip(b.povm.elements()) {
                assert!((x.matrix() - y.matrix()).max_abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn environment_round_trip() {
        let class = random_class(2, 2, 2, ClassStructure::SharedBasis, &mut rng::seeded(4)).unwrap();
        let env = realizable_environment(&class, 0).unwrap();
        let text = serde_json::to_string(&EnvironmentManifest::from_env(&env)).unwrap();
        let back: EnvironmentManifest = serde_json::from_str(&text).unwrap();
        let rebuilt = back.to_env().unwrap();
        assert_eq!(rebuilt.dist(), env.dist());
    }

    #[test]
    fn loss_configs() {
        let l: LossConfig = serde_json::from_str(r#"{"type": "zero_one"}"#).unwrap();
        assert_eq!(l, LossConfig::zero_one());
        let t: LossConfig = serde_json::from_str(r#"{"table": [[0, 0.5], [1, 0]]}"#).unwrap();
        let labels = vec!["a".to_string(), "b".to_string()];
        assert_eq!(t.build(&labels).unwrap().value(0, 1), 0.5);
        let bad: LossConfig = serde_json::from_str(r#"{"type": "hinge"}"#).unwrap();
        assert!(matches!(bad.build(&labels), Err(Error::InvalidLoss(_))));
    }

    #[test]
    fn mismatched_operator_dim_rejected() {
        let text = r#"{"dim": 2, "labels": [0, 1], "predictors": [{"id": 0, "elements": [
            {"dim": 1, "re": [[1]], "im": [[0]]},
            {"dim": 1, "re": [[0]], "im": [[0]]}]}]}"#;
        let m: ClassManifest = serde_json::from_str(text).unwrap();
        assert!(matches!(m.to_class(), Err(Error::DimensionMismatch { .. })));
    }
}
