use super::Environment;
use crate::concept::{ConceptClass, LossFunction, Predictor};
use crate::quantum::{ComplexMatrix, DensityOperator, HermitianOperator, ProjectivePovm};
use crate::{tolerance, Error, Result};

/// Embeds a classical learning problem.
///
/// Feature `x` becomes the basis state `|x⟩⟨x|` and each labeling function
/// `f` becomes the predictor `M_y = Σ_{x: f(x) = y} |x⟩⟨x|`, with id equal to
/// its position in `functions`. All predictors are diagonal, hence mutually
/// compatible.
pub fn classical_embed(
    features: Vec<String>,
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
    functions: &[Vec<usize>],
) -> Result<(Environment, ConceptClass)> {
    let d = features.len();
    if d == 0 {
        return Err(Error::InvalidParameter("empty feature set".into()));
    }
    if d > tolerance::MAX_DIM {
        return Err(Error::DimensionOverflow {
            dim: d,
            max: tolerance::MAX_DIM,
        });
    }
    let states = (0..d).map(|x| DensityOperator::basis(d, x)).collect();
    let env = Environment::new(features, labels.clone(), states, dist)?;

    let predictors = functions
        .iter()
        .enumerate()
        .map(|(id, f)| {
            if f.len() != d {
                return Err(Error::InvalidParameter(format!(
                    "function {id} has {} values, expected {d}",
                    f.len()
                )));
            }
            if let Some(&bad) = f.iter().find(|&&y| y >= labels.len()) {
                return Err(Error::InvalidParameter(format!(
                    "function {id} maps to label index {bad}"
                )));
            }
            let elements = (0..labels.len())
                .map(|y| {
                    let diag: Vec<f64> = f.iter().map(|&fx| if fx == y { 1.0 } else { 0.0 }).collect();
                    HermitianOperator::new(ComplexMatrix::from_diagonal(&diag))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Predictor::new(
                id,
                ProjectivePovm::from_elements(labels.clone(), elements)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((env, ConceptClass::new(labels, predictors)?))
}

/// `E_D[ℓ(Y, f(X))]` for a labeling function over the environment's table.
pub fn classical_risk(dist: &[Vec<f64>], loss: &LossFunction, f: &[usize]) -> f64 {
    dist.iter()
        .enumerate()
        .flat_map(|(x, row)| row.iter().enumerate().map(move |(y, &p)| p * loss.value(y, f[x])))
        .sum()
}
