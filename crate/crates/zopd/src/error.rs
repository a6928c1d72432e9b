//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("composite prox is not defined for this (feasible set, nonsmooth term) pair: {0}")]
    UnsupportedProx(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("brute-force prox oracle did not converge within {iterations} iterations (residual {residual:.3e})")]
    BruteForceNoConvergence { iterations: usize, residual: f64 },

    #[error("inner primal solver did not converge within {iterations} iterations (fixed-point residual {residual:.3e})")]
    InnerSolverNoConvergence { iterations: usize, residual: f64 },

    #[error("oracle returned a non-finite value at the queried point")]
    NonFiniteOracleValue,

    #[error("missing capability: {0}")]
    Capability(String),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("results format error: missing column `{0}`")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("plot rendering failed: {0}")]
    Plot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
