//! A 13-input, single-hidden-layer perceptron that maps a project's
//! use-case and actor histogram to its UUCP.
//!
//! Inputs are the number of use cases at each transaction level 1..=10
//! followed by the number of simple, average and complex actors. Training
//! uses Levenberg-Marquardt over the full Jacobian, with plain gradient
//! descent available as a fallback.

mod model_file;
mod network;
mod train;

pub use model_file::{Normalizer, TrainedModel, TrainingMeta, MODEL_FORMAT_VERSION};
pub use network::{gradient_check, gradient_check_with, Activation, Network, Sample, GRADIENT_CHECK_STEP};
pub use train::{train, train_network, Algorithm, StopReason, TrainConfig, TrainingHistory};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{effective_transactions, ProjectSpec, TransactionPolicy, MAX_LEVEL};

pub const INPUTS: usize = MAX_LEVEL as usize + 3;
pub const DEFAULT_HIDDEN: usize = 20;
pub const HIDDEN_RANGE: std::ops::RangeInclusive<usize> = 14..=25;

/// Use-case histogram by transaction level plus actor counts by class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub use_cases: [u32; MAX_LEVEL as usize],
    pub actors: [u32; 3],
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; INPUTS] {
        let mut out = [0.0; INPUTS];
        for (slot, v) in out.iter_mut().zip(self.use_cases.iter().chain(&self.actors)) {
            *slot = f64::from(*v);
        }
        out
    }
}

pub fn featurize(project: &ProjectSpec, policy: TransactionPolicy) -> Result<FeatureVector> {
    project.validate()?;
    let mut fv = FeatureVector::default();
    for uc in &project.use_cases {
        let level = effective_transactions(uc, policy)?.level;
        fv.use_cases[usize::from(level) - 1] += 1;
    }
    for actor in &project.actors {
        fv.actors[actor.kind.index()] += 1;
    }
    Ok(fv)
}
