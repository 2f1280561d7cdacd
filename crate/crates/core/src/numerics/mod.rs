//! Dense matrices, symmetric eigendecomposition and the seeded random stream
//! every stochastic routine draws from.

mod eigen;
mod matrix;
mod rng;

pub use eigen::{eigh_symmetric, SymmetricEigen};
pub use matrix::{covariance, Matrix};
pub use rng::{derive_seed, splitmix64, RandomSource};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("need at least {required} rows, found {found}")]
    TooFewRows { required: usize, found: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_diff:e})")]
    NotSymmetric { max_diff: f64 },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("cannot sample from an empty range")]
    EmptyRange,
}
