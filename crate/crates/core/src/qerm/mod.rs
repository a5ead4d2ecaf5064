//! Quantum empirical risk minimization.
//!
//! The concept class is split into compatible subclasses, each subclass gets
//! an exclusive batch of samples, every sample in a batch is measured once
//! with the subclass's joint loss measurement, and the predictor with the
//! smallest empirical loss is selected.

mod concentration;
mod measure;
mod plan;
mod run;
mod sample;

pub use concentration::{
    check_concentration, deviation_bound, hoeffding_tail, loss_as_observable, naive_radius, uniform_exceedance,
    uniform_radius, ConcentrationOutcome, Observable, StateSource,
};
pub use measure::{basis_probabilities, joint_loss_distribution, measure_subclass, measure_with_probabilities};
pub use plan::{plan_batches, BatchMode, BatchPlan};
pub use run::{
    plan_run, run_naive, run_naive_env, run_planned_env, run_qerm, run_qerm_env, PartitionStrategy, QermOptions,
    QermReport, Selection,
};
pub use sample::TrainingSample;
