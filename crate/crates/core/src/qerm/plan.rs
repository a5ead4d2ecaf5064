use serde::{Deserialize, Serialize};

use crate::concept::{sample_bound_term, CompatibilityPartition};
use crate::{Error, Result};

/// How batch sizes are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchMode {
    /// Sizes from the sample-complexity bound.
    Complexity,
    /// A fixed total split in proportion to the complexity sizes. This is an
    /// extension for sweeps; it carries no accuracy guarantee.
    Budget(usize),
}

/// Batch size per subclass, in partition order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatchPlan {
    pub sizes: Vec<usize>,
    pub mode: BatchMode,
}

impl BatchPlan {
    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

pub fn plan_batches(
    partition: &CompatibilityPartition,
    epsilon: f64,
    delta: f64,
    mode: BatchMode,
) -> Result<BatchPlan> {
    let m = partition.m();
    let sizes = partition.sizes();
    let weights = sizes
        .iter()
        .map(|&s| sample_bound_term(m, s, epsilon, delta))
        .collect::<Result<Vec<_>>>()?;
    let sizes = match mode {
        BatchMode::Complexity => weights,
        BatchMode::Budget(total) => split_budget(total, &weights, &sizes)?,
    };
    Ok(BatchPlan { sizes, mode })
}

/// Proportional split with every share at least 1. Leftover samples go one
/// at a time to the largest subclasses first (ties to the earlier one).
fn split_budget(total: usize, weights: &[usize], class_sizes: &[usize]) -> Result<Vec<usize>> {
    let m = weights.len();
    if total < m {
        return Err(Error::InfeasibleBudget { total, subclasses: m });
    }
    let weight_sum: usize = weights.iter().sum();
    let mut shares: Vec<usize> = weights
        .iter()
        .map(|&w| ((total as u128 * w as u128) / weight_sum as u128) as usize)
        .map(|s| s.max(1))
        .collect();

    let mut by_size: Vec<usize> = (0..m).collect();
    by_size.sort_by_key(|&r| (std::cmp::Reverse(class_sizes[r]), r));

    let mut assigned: usize = shares.iter().sum();
    while assigned > total {
        // Raising shares to 1 can overshoot; take back from the largest shares.
        let r = (0..m)
            .max_by_key(|&r| (shares[r], std::cmp::Reverse(r)))
            .expect("nonempty");
        shares[r] -= 1;
        assigned -= 1;
    }
    for &r in by_size.iter().cycle() {
        if assigned == total {
            break;
        }
        shares[r] += 1;
        assigned += 1;
    }
    Ok(shares)
}
