//! Simulation of quantum PAC learning.
//!
//! Feature states are density operators, predictors are projective
//! measurements over a finite label alphabet, and learning is done by
//! quantum empirical risk minimization: the concept class is split into
//! internally commuting subclasses, each subclass is measured jointly on its
//! own batch of single-use samples, and the predictor with the smallest
//! empirical loss is returned.
//!
//! Module map:
//!
//! - [`quantum`]: dense complex matrices, validated states and POVMs, Born
//!   probabilities and sampling, eigendecomposition and simultaneous
//!   diagonalization of commuting projective measurements.
//! - [`concept`]: loss functions, predictors, loss observables, true risk,
//!   compatibility testing and compatibility partitioning.
//! - [`qerm`]: batch planning, joint subclass measurement, the QERM and naive
//!   learners, and concentration checks.
//! - [`env`]: synthetic environments and concept-class factories.
//! - [`harness`]: experiment configuration and the command implementations
//!   behind the `qpac` binary.

pub mod concept;
pub mod env;
pub mod error;
pub mod harness;
pub mod qerm;
pub mod quantum;
pub mod rng;
pub mod tolerance;

pub use error::{Error, Result};
