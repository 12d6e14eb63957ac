//! Benchmark datasets, channel-equalization signal synthesis, train/test
//! splits and scoring.

mod metrics;
mod nlc;
mod split;
mod tabular;

pub use metrics::{evaluate, Distribution, Metrics, ScoreKind};
pub use nlc::{nlc_from_symbols, nlc_generate, nlc_sequence, NlcConfig, NlcSequence, SnrReference, NLC_WINDOW};
pub use split::{split, SplitPlan};
pub use tabular::{
    bundled, bundled_data_dir, load_tabular_task, parse_tabular_task, verify_bundled_data, DataCheck, TabularSchema,
    BANKNOTE_PAPER_FEATURES, BANKNOTE_PUBLIC_FEATURES,
};

use thiserror::Error;

use crate::elm::{decide, Prediction, TaskKind};
use crate::numerics::{NumericsError, RealMatrix};

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid channel config: {0}")]
    InvalidNlc(String),
    #[error("invalid split plan: {0}")]
    InvalidSplit(String),
    #[error("{predictions} predictions for {targets} targets")]
    LengthMismatch { predictions: usize, targets: usize },
    #[error("no scores to summarize")]
    Empty,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Feature matrix `U`, target matrix `Ỹ` and the output convention.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDataset {
    pub name: String,
    pub features: RealMatrix,
    pub targets: RealMatrix,
    pub kind: TaskKind,
    /// Class names for classification tasks, symbol values for the channel
    /// task.
    pub labels: Vec<String>,
}

impl TaskDataset {
    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ground-truth decision of sample `i`, obtained by applying the decision
    /// rule to its target row.
    pub fn truth(&self, i: usize) -> Prediction {
        decide(self.targets.row(i), self.kind)
    }

    pub fn score_kind(&self) -> ScoreKind {
        match self.kind {
            TaskKind::SymbolSnap => ScoreKind::SymbolErrorRate,
            _ => ScoreKind::Accuracy,
        }
    }
}
