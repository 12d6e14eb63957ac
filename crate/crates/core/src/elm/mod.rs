//! The learning pipeline: input preprocessing and comb encoding, hidden-layer
//! simulation, ridge-regression training, and emulation of optical output
//! weighting with two photodiodes.

mod decision;
mod encode;
mod hidden;
mod readout;

pub use decision::{decide, Prediction, TaskKind, NLC_SYMBOLS};
pub use encode::{encode_input, preprocess, InputScale, PreprocessConfig, Preprocessed};
pub use hidden::{build_hidden_matrix, build_input_matrix, forward, HiddenMatrix, PhotonicElm};
pub use readout::{
    implied_c, optical_readout, predict_digital, predict_optical, readout_filters, split_weights, train_c,
    train_digital, weights_to_filter, ReadoutCoefficients, WeightMapping, WeightScale, WeightSet,
};

use thiserror::Error;

use crate::numerics::NumericsError;
use crate::optics::OpticsError;

/// Number of hidden nodes read from the mixed comb.
pub const HIDDEN_NODES: usize = 31;
/// Hidden nodes are the lines `k = -15 ..= 15`.
pub const HIDDEN_HALF_WIDTH: i32 = 15;
/// Input field amplitude used throughout; only relative powers matter.
pub const E0: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElmError {
    #[error("{0} input nodes do not fit on the {HIDDEN_NODES} central comb lines")]
    Capacity(usize),
    #[error("invalid preprocessing config: {0}")]
    InvalidConfig(String),
    #[error("training index set is empty")]
    EmptyTrainSet,
    #[error("index {index} out of range for {len} samples")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("weights have not been split into positive and negative parts")]
    NotSplit,
    #[error("need at least 3 readings to fit readout coefficients, got {0}")]
    TooFewReadings(usize),
    #[error("readout coefficients have no closed form under the dB-linear weight mapping")]
    NoClosedForm,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}
