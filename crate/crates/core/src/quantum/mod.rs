//! Dense complex-matrix foundation: validated operators, states and POVMs.

mod born;
mod eigen;
pub mod json;
mod matrix;
mod operator;
mod povm;
pub(crate) mod simultaneous;

pub use born::{born_distribution, born_sample, clamp_distribution, sample_index};
pub use eigen::{eig_hermitian, Eigen};
pub use matrix::{c64, ComplexMatrix};
pub use operator::{tensor, tensor_with_limit, DensityOperator, HermitianOperator};
pub use povm::{Povm, ProjectivePovm};
pub use simultaneous::{simultaneous_eigenbasis, SharedEigenbasis};

pub use num_complex::Complex64;
