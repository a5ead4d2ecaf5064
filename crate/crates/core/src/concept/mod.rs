//! Predictors, losses, loss observables, risk, and compatibility partitioning.

mod class;
mod compat;
mod loss;
mod observable;
mod partition;
mod risk;

pub use class::{ConceptClass, Predictor};
pub use compat::{are_compatible, compatibility_graph};
pub use loss::LossFunction;
pub use observable::{loss_observable, LossObservable};
pub use partition::{
    best_partition, compatible_class_bound, objective_of_partition, partition_compatible, partition_with,
    sample_bound_term, singleton_partition, CompatibilityPartition, GreedyOrder, PartitionChoice, PartitionOptions,
    Strategy,
};
pub use risk::{opt_risk, true_risk, true_risk_via_observable};
