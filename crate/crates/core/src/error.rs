// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: node index {index} out of range")]
    Range { line: usize, index: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("eigensolver failed to converge after {iterations} QR iterations")]
    Eigensolver { iterations: usize },

    #[error(
        "expected a simple zero eigenvalue, found {count} within {tol:e} (non-relaxing dynamics)"
    )]
    Degenerate { count: usize, tol: f64 },

    #[error("non-finite value encountered {0}")]
    Divergence(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("total activity {0:e} too small to normalize")]
    UndefinedNormalization(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Eigensolver { .. }
                | Error::Degenerate { .. }
                | Error::Divergence(_)
                | Error::Model(_)
                | Error::UndefinedNormalization(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
