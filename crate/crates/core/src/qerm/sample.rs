use std::sync::Arc;

use crate::quantum::{ComplexMatrix, DensityOperator};
use crate::{Error, Result};

/// One quantum training sample `ρ_x ⊗ |y⟩⟨y|`.
///
/// Samples can be measured once. The feature state is shared with the
/// environment that produced it; the joint state is only built on request.
#[derive(Clone, Debug)]
pub struct TrainingSample {
    pub id: usize,
    pub x: usize,
    pub y: usize,
    state: Arc<DensityOperator>,
    consumed: bool,
}

impl TrainingSample {
    pub fn new(x: usize, y: usize, state: Arc<DensityOperator>) -> Self {
        Self {
            id: 0,
            x,
            y,
            state,
            consumed: false,
        }
    }

    pub fn with_id(mut self, id: usize) -> Self {
        self.id = id;
        self
    }

    /// The feature state `ρ_x`.
    pub fn state(&self) -> &Arc<DensityOperator> {
        &self.state
    }

    /// `ρ_x ⊗ |y⟩⟨y|` over `labels` label levels.
    pub fn joint_state(&self, labels: usize) -> Result<DensityOperator> {
        if self.y >= labels {
            return Err(Error::InvalidParameter(format!("label {} out of range", self.y)));
        }
        self.state
            .tensor(&DensityOperator::from_trusted(ComplexMatrix::basis_projector(
                labels, self.y,
            )))
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Marks the sample as measured; a second call is an error.
    pub(crate) fn consume(&mut self) -> Result<()> {
        if self.consumed {
            return Err(Error::SampleConsumed(self.id));
        }
        self.consumed = true;
        Ok(())
    }
}
