use std::collections::HashSet;

use super::{ComplexMatrix, HermitianOperator};
use crate::{tolerance, Error, Result};

/// Positive operator-valued measure over an ordered set of outcome labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    outcomes: Vec<String>,
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(outcomes: Vec<String>, elements: Vec<HermitianOperator>) -> Result<Self> {
        Self::check_structure(&outcomes, &elements)?;
        for op in &elements {
            let min = op.min_eigenvalue()?;
            if min < -tolerance::PSD {
                return Err(Error::NotPsd(min));
            }
        }
        let dev = Self::completeness_residual(&elements);
        if dev > tolerance::COMPLETENESS {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self { outcomes, elements })
    }

    fn check_structure(outcomes: &[String], elements: &[HermitianOperator]) -> Result<()> {
        if elements.is_empty() {
            return Err(Error::EmptyPovm);
        }
        if outcomes.len() != elements.len() {
            return Err(Error::OutcomeCount {
                outcomes: outcomes.len(),
                elements: elements.len(),
            });
        }
        let mut seen = HashSet::new();
        for o in outcomes {
            if !seen.insert(o.as_str()) {
                return Err(Error::DuplicateOutcome(o.clone()));
            }
        }
        let d = elements[0].dim();
        if let Some(bad) = elements.iter().find(|e| e.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(())
    }

    /// Largest entry magnitude of `Σ_v M_v - I`.
    pub fn completeness_residual(elements: &[HermitianOperator]) -> f64 {
        let Some(first) = elements.first() else {
            return f64::INFINITY;
        };
        let d = first.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in elements {
            if e.dim() != d {
                return f64::INFINITY;
            }
            sum = &sum + e.matrix();
        }
        (&sum - &ComplexMatrix::identity(d)).max_abs()
    }

    /// Measurement in the computational basis with outcomes `"0".."d-1"`.
    pub fn computational_basis(d: usize) -> Self {
        let outcomes = (0..d).map(|k| k.to_string()).collect();
        let elements = (0..d)
            .map(|k| HermitianOperator::from_trusted(ComplexMatrix::basis_projector(d, k)))
            .collect();
        Self { outcomes, elements }
    }

    /// Single-outcome measurement `{I}`.
    pub fn trivial(d: usize, outcome: &str) -> Self {
        Self {
            outcomes: vec![outcome.to_string()],
            elements: vec![HermitianOperator::identity(d)],
        }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &HermitianOperator {
        &self.elements[index]
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }
}

/// POVM whose elements are orthogonal projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePovm(Povm);

impl ProjectivePovm {
    pub fn new(povm: Povm) -> Result<Self> {
        for (index, e) in povm.elements.iter().enumerate() {
            let residual = e.projectivity_residual();
            if residual > tolerance::PROJECTIVE {
                return Err(Error::NotProjective { index, residual });
            }
        }
        Ok(Self(povm))
    }

    pub fn from_elements(outcomes: Vec<String>, elements: Vec<HermitianOperator>) -> Result<Self> {
        Self::new(Povm::new(outcomes, elements)?)
    }

    /// Projective measurement that assigns basis vector `k` (column `k` of
    /// `basis`) to outcome `assignment[k]`.
    pub fn from_basis(basis: &ComplexMatrix, assignment: &[usize], outcomes: Vec<String>) -> Result<Self> {
        let d = basis.rows();
        if assignment.len() != basis.cols() || basis.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: assignment.len(),
            });
        }
        if let Some(&bad) = assignment.iter().find(|&&a| a >= outcomes.len()) {
            return Err(Error::InvalidParameter(format!("outcome index {bad} out of range")));
        }
        let mut mats = vec![ComplexMatrix::zeros(d, d); outcomes.len()];
        for (k, &y) in assignment.iter().enumerate() {
            mats[y] = &mats[y] + &ComplexMatrix::outer(&basis.column(k));
        }
        let elements = mats
            .into_iter()
            .map(HermitianOperator::new)
            .collect::<Result<Vec<_>>>()?;
        Self::from_elements(outcomes, elements)
    }

    pub fn computational_basis(d: usize) -> Self {
        Self(Povm::computational_basis(d))
    }

    pub fn povm(&self) -> &Povm {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn outcomes(&self) -> &[String] {
        self.0.outcomes()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        self.0.elements()
    }

    /// Largest `‖M_a M_b‖_F` over distinct element pairs.
    pub fn orthogonality_residual(&self) -> f64 {
        let els = self.elements();
        let mut worst: f64 = 0.0;
        for a in 0..els.len() {
            for b in 0..els.len() {
                if a != b {
                    worst = worst.max((els[a].matrix() * els[b].matrix()).frobenius());
                }
            }
        }
        worst
    }
}
