use std::collections::HashSet;

use crate::quantum::ProjectivePovm;
use crate::{Error, Result};

/// One hypothesis: a projective measurement with outcomes in the label alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Predictor {
    pub id: usize,
    pub povm: ProjectivePovm,
}

impl Predictor {
    pub fn new(id: usize, povm: ProjectivePovm) -> Self {
        Self { id, povm }
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }
}

/// Finite, ordered collection of predictors sharing dimension and labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ConceptClass {
    dim: usize,
    labels: Vec<String>,
    predictors: Vec<Predictor>,
}

impl ConceptClass {
    pub fn new(labels: Vec<String>, predictors: Vec<Predictor>) -> Result<Self> {
        let first = predictors
            .first()
            .ok_or_else(|| Error::InvalidClass("empty concept class".into()))?;
        let dim = first.dim();
        let mut ids = HashSet::new();
        for p in &predictors {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if p.povm.outcomes() != labels.as_slice() {
                return Err(Error::AlphabetMismatch);
            }
            if !ids.insert(p.id) {
                return Err(Error::InvalidClass(format!("duplicate predictor id {}", p.id)));
            }
        }
        Ok(Self {
            dim,
            labels,
            predictors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn predictors(&self) -> &[Predictor] {
        &self.predictors
    }

    pub fn predictor(&self, index: usize) -> &Predictor {
        &self.predictors[index]
    }

    pub fn len(&self) -> usize {
        self.predictors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictors.is_empty()
    }

    /// Sub-class holding the predictors at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            self.labels.clone(),
            indices.iter().map(|&i| self.predictors[i].clone()).collect(),
        )
    }
}
