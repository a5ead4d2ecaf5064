use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::basis_probabilities;
use super::{measure_with_probabilities, plan_batches, BatchMode, BatchPlan, TrainingSample};
use crate::concept::{
    best_partition, opt_risk, partition_with, singleton_partition, true_risk, CompatibilityPartition, ConceptClass,
    LossFunction, PartitionOptions, Strategy,
};
use crate::env::{draw_samples, Environment};
use crate::quantum::SharedEigenbasis;
use crate::{rng, Error, Result};

/// Partitioning used by a QERM run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionStrategy {
    Greedy,
    Exact,
    Singleton,
    /// Smallest sample bound among exact, greedy and singleton.
    Best,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QermOptions {
    pub epsilon: f64,
    pub delta: f64,
    pub strategy: PartitionStrategy,
    pub mode: BatchMode,
    pub partition: PartitionOptions,
}

impl QermOptions {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            strategy: PartitionStrategy::Best,
            mode: BatchMode::Complexity,
            partition: PartitionOptions::default(),
        }
    }

    pub fn with_strategy(mut self, strategy: PartitionStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_mode(mut self, mode: BatchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_partition(mut self, partition: PartitionOptions) -> Self {
        self.partition = partition;
        self
    }
}

/// Selected predictor: subclass `r`, position `j` inside it, and its id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub r: usize,
    pub j: usize,
    pub id: usize,
    #[serde(skip)]
    pub position: usize,
}

/// Outcome of one QERM (or naive) run.
#[derive(Clone, Debug, Serialize)]
pub struct QermReport {
    /// Predictor ids per subclass.
    pub partition: Vec<Vec<usize>>,
    pub strategy: Strategy,
    pub mode: BatchMode,
    pub batch_sizes: Vec<usize>,
    pub n_total: usize,
    /// Empirical loss per predictor, aligned with `partition`.
    pub empirical_losses: Vec<Vec<f64>>,
    pub selected: Selection,
    pub emp_loss_selected: f64,
    pub true_risk_selected: Option<f64>,
    pub opt: Option<f64>,
    pub excess: Option<f64>,
}

impl QermReport {
    pub fn m(&self) -> usize {
        self.partition.len()
    }

    /// Whether the selected predictor misses the class optimum by more than `epsilon`.
    pub fn failed(&self, epsilon: f64) -> Option<bool> {
        self.excess.map(|e| e > epsilon)
    }
}

fn choose_partition(class: &ConceptClass, opts: &QermOptions) -> Result<CompatibilityPartition> {
    match opts.strategy {
        PartitionStrategy::Greedy => partition_with(class, Strategy::Greedy, opts.partition),
        PartitionStrategy::Exact => partition_with(class, Strategy::Exact, opts.partition),
        PartitionStrategy::Singleton => singleton_partition(class),
        PartitionStrategy::Best => Ok(best_partition(class, opts.epsilon, opts.delta, opts.partition)?.partition),
    }
}

fn prepare(
    class: &ConceptClass,
    loss: &LossFunction,
    opts: &QermOptions,
) -> Result<(CompatibilityPartition, BatchPlan)> {
    if class.labels() != loss.labels() {
        return Err(Error::AlphabetMismatch);
    }
    let partition = choose_partition(class, opts)?;
    let plan = plan_batches(&partition, opts.epsilon, opts.delta, opts.mode)?;
    Ok((partition, plan))
}

/// QERM on a given list of samples. Samples are assigned to subclasses in
/// arrival order; any samples beyond the plan's total are left untouched.
pub fn run_qerm<R: Rng + ?Sized>(
    class: &ConceptClass,
    loss: &LossFunction,
    samples: &mut [TrainingSample],
    opts: &QermOptions,
    rng: &mut R,
) -> Result<QermReport> {
    let (partition, plan) = prepare(class, loss, opts)?;
    execute(class, loss, &partition, &plan, samples, rng.random())
}

/// QERM on fresh samples drawn from `env`; the report includes true risks.
pub fn run_qerm_env<R: Rng + ?Sized>(
    class: &ConceptClass,
    loss: &LossFunction,
    env: &Environment,
    opts: &QermOptions,
    rng: &mut R,
) -> Result<QermReport> {
    let (partition, plan) = prepare(class, loss, opts)?;
    run_planned_env(class, loss, env, &partition, &plan, rng)
}

/// Partition and batch plan that a run with `opts` would use.
pub fn plan_run(
    class: &ConceptClass,
    loss: &LossFunction,
    opts: &QermOptions,
) -> Result<(CompatibilityPartition, BatchPlan)> {
    prepare(class, loss, opts)
}

/// QERM on fresh samples from `env` with a partition and plan computed
/// beforehand by [`plan_run`], so repeated trials skip the partitioning.
pub fn run_planned_env<R: Rng + ?Sized>(
    class: &ConceptClass,
    loss: &LossFunction,
    env: &Environment,
    partition: &CompatibilityPartition,
    plan: &BatchPlan,
    rng: &mut R,
) -> Result<QermReport> {
    if env.labels() != class.labels() {
        return Err(Error::AlphabetMismatch);
    }
    if env.dim() != class.dim() {
        return Err(Error::DimensionMismatch {
            expected: class.dim(),
            found: env.dim(),
        });
    }
    let mut samples = draw_samples(env, plan.total(), rng)?;
    let mut report = execute(class, loss, partition, plan, &mut samples, rng.random())?;
    let (opt, _) = opt_risk(class, env, loss)?;
    let selected = true_risk(class.predictor(report.selected.position), env, loss)?;
    report.true_risk_selected = Some(selected);
    report.opt = Some(opt);
    report.excess = Some(selected - opt);
    Ok(report)
}

/// Baseline that gives every predictor its own batch.
pub fn run_naive<R: Rng + ?Sized>(
    class: &ConceptClass,
    loss: &LossFunction,
    samples: &mut [TrainingSample],
    opts: &QermOptions,
    rng: &mut R,
) -> Result<QermReport> {
    run_qerm(
        class,
        loss,
        samples,
        &opts.with_strategy(PartitionStrategy::Singleton),
        rng,
    )
}

pub fn run_naive_env<R: Rng + ?Sized>(
    class: &ConceptClass,
    loss: &LossFunction,
    env: &Environment,
    opts: &QermOptions,
    rng: &mut R,
) -> Result<QermReport> {
    run_qerm_env(class, loss, env, &opts.with_strategy(PartitionStrategy::Singleton), rng)
}

fn execute(
    class: &ConceptClass,
    loss: &LossFunction,
    partition: &CompatibilityPartition,
    plan: &BatchPlan,
    samples: &mut [TrainingSample],
    measurement_seed: u64,
) -> Result<QermReport> {
    let needed = plan.total();
    if samples.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            available: samples.len(),
        });
    }

    let mut batches = Vec::with_capacity(plan.sizes.len());
    let mut rest = &mut samples[..needed];
    let mut offset = 0;
    for &size in &plan.sizes {
        let (head, tail) = rest.split_at_mut(size);
        batches.push((offset, head));
        offset += size;
        rest = tail;
    }

    let empirical_losses = batches
        .into_par_iter()
        .zip(partition.bases().par_iter())
        .map(|((offset, batch), basis)| measure_batch(basis, batch, offset, loss, measurement_seed))
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(f64, usize, usize)> = None;
    for (r, losses) in empirical_losses.iter().enumerate() {
        for (j, &l) in losses.iter().enumerate() {
            if best.is_none_or(|(b, _, _)| l < b) {
                best = Some((l, r, j));
            }
        }
    }
    let (emp, r, j) = best.expect("nonempty partition");
    let position = partition.subclasses()[r][j];

    Ok(QermReport {
        partition: partition.ids(class),
        strategy: partition.strategy(),
        mode: plan.mode,
        batch_sizes: plan.sizes.clone(),
        n_total: needed,
        empirical_losses,
        selected: Selection {
            r,
            j,
            id: class.predictor(position).id,
            position,
        },
        emp_loss_selected: emp,
        true_risk_selected: None,
        opt: None,
        excess: None,
    })
}

/// Mean loss vector of one batch. Sample `offset + i` draws from its own
/// sub-stream of `seed`, so results do not depend on scheduling.
fn measure_batch(
    basis: &SharedEigenbasis,
    batch: &mut [TrainingSample],
    offset: usize,
    loss: &LossFunction,
    seed: u64,
) -> Result<Vec<f64>> {
    let width = basis.outcome_table[0].len();
    let mut sums = vec![0.0; width];
    let mut cache: HashMap<*const crate::quantum::DensityOperator, Vec<f64>> = HashMap::new();
    for (i, sample) in batch.iter_mut().enumerate() {
        if sample.is_consumed() {
            return Err(Error::SampleConsumed(sample.id));
        }
        let key = std::sync::Arc::as_ptr(sample.state());
        if let Entry::Vacant(slot) = cache.entry(key) {
            slot.insert(basis_probabilities(basis, sample.state())?);
        }
        let mut stream = rng::split(seed, (offset + i) as u64);
        let z = measure_with_probabilities(basis, &cache[&key], sample, loss, &mut stream)?;
        for (s, v) in sums.iter_mut().zip(z) {
            *s += v;
        }
    }
    let n = batch.len() as f64;
    Ok(sums.into_iter().map(|s| s / n).collect())
}
