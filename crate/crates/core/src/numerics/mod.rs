//! Special functions and dense least-squares solvers.

mod bessel;
mod lstsq;
mod matrix;

pub use bessel::{bessel_j, bessel_j_symmetric, bessel_j_table, bessel_support, MAX_ARGUMENT, MAX_ORDER};
pub use lstsq::{ols_solve, ridge_solve};
pub use matrix::RealMatrix;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("J_{order}({argument}) is outside the supported envelope |order| <= 200, |x| <= 50")]
    Domain { order: i32, argument: f64 },
    #[error("matrix is rank deficient: column {column} is dependent (rank {rank} of {cols})")]
    RankDeficient { column: usize, rank: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("regularization must be finite and non-negative, got {0}")]
    InvalidRegularization(f64),
}
