use rayon::prelude::*;

use super::{ConceptClass, Predictor};
use crate::quantum::simultaneous;
use crate::{Error, Result};

/// Whether every element pair of the two predictors commutes.
pub fn are_compatible(p: &Predictor, q: &Predictor) -> Result<bool> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(simultaneous::povms_commute(&p.povm, &q.povm))
}

/// Symmetric adjacency matrix of the compatibility graph (reflexive).
pub fn compatibility_graph(class: &ConceptClass) -> Vec<Vec<bool>> {
    let k = class.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let edges: Vec<bool> = pairs
        .par_iter()
        .map(|&(i, j)| simultaneous::povms_commute(&class.predictor(i).povm, &class.predictor(j).povm))
        .collect();
    let mut adj = vec![vec![false; k]; k];
    for (i, row) in adj.iter_mut().enumerate() {
        row[i] = true;
    }
    for (&(i, j), &e) in pairs.iter().zip(&edges) {
        adj[i][j] = e;
        adj[j][i] = e;
    }
    adj
}
