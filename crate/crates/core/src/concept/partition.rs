use std::fmt;

use serde::{Deserialize, Serialize};

use super::{compatibility_graph, ConceptClass};
use crate::quantum::{simultaneous_eigenbasis, ProjectivePovm, SharedEigenbasis};
use crate::{tolerance, Error, Result};

/// How a compatibility partition was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Greedy,
    Exact,
    Singleton,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Greedy => "greedy",
            Strategy::Exact => "exact",
            Strategy::Singleton => "singleton",
        })
    }
}

/// Order in which the first-fit greedy partitioner visits predictors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyOrder {
    #[default]
    Index,
    /// Predictors with the fewest compatible partners first (ties by index).
    FewestCompatibleFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionOptions {
    pub greedy_order: GreedyOrder,
    pub exact_limit: usize,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self {
            greedy_order: GreedyOrder::Index,
            exact_limit: tolerance::EXACT_LIMIT,
        }
    }
}

/// Disjoint cover of a concept class by internally compatible subclasses.
///
/// Subclasses hold positions into the class (not predictor ids), sorted
/// ascending, and are ordered by their smallest member. Each subclass carries
/// the shared eigenbasis used for its joint measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityPartition {
    subclasses: Vec<Vec<usize>>,
    bases: Vec<SharedEigenbasis>,
    strategy: Strategy,
}

impl CompatibilityPartition {
    pub fn new(class: &ConceptClass, mut subclasses: Vec<Vec<usize>>, strategy: Strategy) -> Result<Self> {
        let k = class.len();
        let mut seen = vec![false; k];
        for sub in subclasses.iter_mut() {
            if sub.is_empty() {
                return Err(Error::InvalidParameter("empty subclass".into()));
            }
            sub.sort_unstable();
            for &i in sub.iter() {
                if i >= k || seen[i] {
                    return Err(Error::InvalidParameter(format!("index {i} repeated or out of range")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter("subclasses do not cover the class".into()));
        }
        subclasses.sort_by_key(|s| s[0]);
        let bases = subclasses
            .iter()
            .map(|sub| {
                let family: Vec<ProjectivePovm> = sub.iter().map(|&i| class.predictor(i).povm.clone()).collect();
                simultaneous_eigenbasis(&family).map_err(|e| match e {
                    Error::Incompatible(a, b) => Error::Incompatible(sub[a], sub[b]),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            subclasses,
            bases,
            strategy,
        })
    }

    pub fn subclasses(&self) -> &[Vec<usize>] {
        &self.subclasses
    }

    pub fn bases(&self) -> &[SharedEigenbasis] {
        &self.bases
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Number of subclasses.
    pub fn m(&self) -> usize {
        self.subclasses.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.subclasses.iter().map(Vec::len).collect()
    }

    /// Predictor ids per subclass.
    pub fn ids(&self, class: &ConceptClass) -> Vec<Vec<usize>> {
        self.subclasses
            .iter()
            .map(|s| s.iter().map(|&i| class.predictor(i).id).collect())
            .collect()
    }
}

/// One predictor per subclass; always valid.
pub fn singleton_partition(class: &ConceptClass) -> Result<CompatibilityPartition> {
    CompatibilityPartition::new(class, (0..class.len()).map(|i| vec![i]).collect(), Strategy::Singleton)
}

pub fn partition_compatible(class: &ConceptClass, strategy: Strategy) -> Result<CompatibilityPartition> {
    partition_with(class, strategy, PartitionOptions::default())
}

pub fn partition_with(
    class: &ConceptClass,
    strategy: Strategy,
    options: PartitionOptions,
) -> Result<CompatibilityPartition> {
    let groups = match strategy {
        Strategy::Singleton => return singleton_partition(class),
        Strategy::Greedy => greedy_cover(&compatibility_graph(class), options.greedy_order),
        Strategy::Exact => {
            if class.len() > options.exact_limit {
                return Err(Error::ExactLimit {
                    size: class.len(),
                    limit: options.exact_limit,
                });
            }
            exact_cover(&compatibility_graph(class))
        }
    };
    CompatibilityPartition::new(class, groups, strategy)
}

/// First-fit clique cover: each vertex joins the first subclass it is
/// compatible with, otherwise opens a new one.
fn greedy_cover(adj: &[Vec<bool>], order: GreedyOrder) -> Vec<Vec<usize>> {
    let k = adj.len();
    let mut visit: Vec<usize> = (0..k).collect();
    if order == GreedyOrder::FewestCompatibleFirst {
        visit.sort_by_key(|&v| (adj[v].iter().filter(|&&e| e).count(), v));
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in visit {
        match groups.iter_mut().find(|g| g.iter().all(|&u| adj[u][v])) {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    groups
}

/// Minimum clique cover by branch and bound over canonical set partitions.
///
/// Among covers with the fewest cliques, the one with the smallest product
/// of subclass sizes wins (this minimizes the sample-bound objective for a
/// fixed subclass count), then the lexicographically smallest.
fn exact_cover(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let k = adj.len();
    let masks: Vec<u32> = adj
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold(0u32, |m, (j, &e)| if e { m | 1 << j } else { m })
        })
        .collect();

    struct Search<'a> {
        masks: &'a [u32],
        k: usize,
        blocks: Vec<u32>,
        bound: usize,
        best: Option<(usize, u128, Vec<Vec<usize>>)>,
    }

    impl Search<'_> {
        fn run(&mut self, v: usize) {
            if self.blocks.len() > self.bound {
                return;
            }
            if v == self.k {
                let groups: Vec<Vec<usize>> = self
                    .blocks
                    .iter()
                    .map(|&b| (0..self.k).filter(|&i| b & (1 << i) != 0).collect())
                    .collect();
                let product: u128 = groups.iter().map(|g| g.len() as u128).product();
                let key = (groups.len(), product, groups);
                if self.best.as_ref().is_none_or(|b| key < *b) {
                    self.bound = key.0;
                    self.best = Some(key);
                }
                return;
            }
            for b in 0..self.blocks.len() {
                if self.blocks[b] & !self.masks[v] == 0 {
                    self.blocks[b] |= 1 << v;
                    self.run(v + 1);
                    self.blocks[b] &= !(1 << v);
                }
            }
            if self.blocks.len() < self.bound {
                self.blocks.push(1 << v);
                self.run(v + 1);
                self.blocks.pop();
            }
        }
    }

    let bound = greedy_cover(adj, GreedyOrder::Index).len();
    let mut search = Search {
        masks: &masks,
        k,
        blocks: Vec::new(),
        bound,
        best: None,
    };
    search.run(0);
    search.best.map(|b| b.2).unwrap_or_default()
}

fn check_accuracy(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
    }
    Ok(())
}

/// `⌈(8/ε²) ln(2 m size / δ)⌉`: samples for one subclass of `size`
/// predictors in an `m`-subclass partition.
pub fn sample_bound_term(m: usize, size: usize, epsilon: f64, delta: f64) -> Result<usize> {
    check_accuracy(epsilon, delta)?;
    let value = 8.0 / (epsilon * epsilon) * (2.0 * m as f64 * size as f64 / delta).ln();
    Ok(value.ceil().max(1.0) as usize)
}

/// Sample-complexity bound `Σ_r ⌈(8/ε²) ln(2 m |C_r| / δ)⌉` of a partition.
pub fn objective_of_partition(partition: &CompatibilityPartition, epsilon: f64, delta: f64) -> Result<usize> {
    let m = partition.m();
    partition
        .sizes()
        .into_iter()
        .map(|s| sample_bound_term(m, s, epsilon, delta))
        .sum()
}

/// Compatible-class bound `⌈(2/ε²) ln(|C| / δ)⌉`, reported for comparison.
pub fn compatible_class_bound(class_size: usize, epsilon: f64, delta: f64) -> Result<usize> {
    check_accuracy(epsilon, delta)?;
    let value = 2.0 / (epsilon * epsilon) * (class_size as f64 / delta).ln();
    Ok(value.ceil().max(0.0) as usize)
}

/// Result of minimizing the sample bound over the available strategies.
#[derive(Clone, Debug)]
pub struct PartitionChoice {
    pub partition: CompatibilityPartition,
    /// Objective of every strategy that ran, in the order tried.
    pub objectives: Vec<(Strategy, usize, usize)>,
}

impl PartitionChoice {
    pub fn winner(&self) -> Strategy {
        self.partition.strategy()
    }

    pub fn objective(&self) -> usize {
        self.objectives
            .iter()
            .find(|o| o.0 == self.winner())
            .map(|o| o.2)
            .unwrap_or_default()
    }
}

/// Runs exact (when within the size limit), greedy and singleton
/// partitioning and keeps the one with the smallest sample bound. Ties go to
/// the earlier strategy in that order.
pub fn best_partition(
    class: &ConceptClass,
    epsilon: f64,
    delta: f64,
    options: PartitionOptions,
) -> Result<PartitionChoice> {
    check_accuracy(epsilon, delta)?;
    let mut candidates = Vec::new();
    if class.len() <= options.exact_limit {
        candidates.push(partition_with(class, Strategy::Exact, options)?);
    }
    candidates.push(partition_with(class, Strategy::Greedy, options)?);
    candidates.push(singleton_partition(class)?);

    let mut objectives = Vec::new();
    let mut best: Option<(usize, CompatibilityPartition)> = None;
    for p in candidates {
        let obj = objective_of_partition(&p, epsilon, delta)?;
        objectives.push((p.strategy(), p.m(), obj));
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, p));
        }
    }
    Ok(PartitionChoice {
        partition: best.expect("at least one candidate").1,
        objectives,
    })
}
