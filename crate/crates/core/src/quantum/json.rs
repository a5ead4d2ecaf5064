//! JSON documents for operators and POVMs.
//!
//! An operator is `{"dim": d, "re": [[...]], "im": [[...]]}` with row-major
//! nested arrays; a POVM is `{"outcomes": [...], "elements": [op, ...]}`.
//! Outcome labels may be given as strings or numbers and are kept as strings.

use serde::{Deserialize, Deserializer, Serialize};

use super::{ComplexMatrix, HermitianOperator, Povm};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (re, im) = m.to_parts();
        Self { dim: m.rows(), re, im }
    }

    /// Parses into a square matrix without any Hermitian or positivity checks.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let m = ComplexMatrix::from_parts(&self.re, &self.im)?;
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::Manifest(format!(
                "declared dim {} but entries are {}x{}",
                self.dim,
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    }

    pub fn to_hermitian(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.to_matrix()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    #[serde(deserialize_with = "labels")]
    pub outcomes: Vec<String>,
    pub elements: Vec<OperatorJson>,
}

impl PovmJson {
    pub fn from_povm(p: &Povm) -> Self {
        Self {
            outcomes: p.outcomes().to_vec(),
            elements: p
                .elements()
                .iter()
                .map(|e| OperatorJson::from_matrix(e.matrix()))
                .collect(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        let elements = self
            .elements
            .iter()
            .map(OperatorJson::to_hermitian)
            .collect::<Result<Vec<_>>>()?;
        Povm::new(self.outcomes.clone(), elements)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Int(i64),
    Float(f64),
}

/// Accepts labels written either as JSON strings or numbers.
pub fn labels<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    let raw = Vec::<Label>::deserialize(d)?;
    Ok(raw
        .into_iter()
        .map(|l| match l {
            Label::Text(s) => s,
            Label::Int(i) => i.to_string(),
            Label::Float(f) => f.to_string(),
        })
        .collect())
}
