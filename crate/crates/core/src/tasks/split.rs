use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TaskError;
use crate::seed::{derive, stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train_fraction: f64,
    pub seed: u64,
    pub n_repeats: usize,
}

impl SplitPlan {
    pub fn new(seed: u64, n_repeats: usize) -> Self {
        Self {
            train_fraction: 0.7,
            seed,
            n_repeats,
        }
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(TaskError::InvalidSplit(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        if self.n_repeats == 0 {
            return Err(TaskError::InvalidSplit("zero repeats".into()));
        }
        Ok(())
    }

    /// Number of training rows out of `n`.
    pub fn train_len(&self, n: usize) -> usize {
        // Guard against products like 0.7 * 10 landing just above an integer.
        ((self.train_fraction * n as f64) - 1e-9).ceil().max(0.0) as usize
    }
}

/// Random partition of `0..n` into train and test indices for one repeat.
pub fn split(n: usize, plan: &SplitPlan, repeat: usize) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive(plan.seed, stream::SPLIT, repeat as u64));
    idx.shuffle(&mut rng);
    let test = idx.split_off(plan.train_len(n).min(n));
    (idx, test)
}
