use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },

    #[error("row {row}: column {column}: cannot parse `{value}` as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} (sl. {sl}): column {column}: {reason}")]
    Validation {
        row: usize,
        sl: String,
        column: String,
        reason: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("feature {feature} is constant (min = max = {value}); cannot scale")]
    ConstantColumn { feature: String, value: f64 },

    #[error("split {split}: {reason}")]
    Split { split: String, reason: String },

    #[error("metric {metric}: {reason}")]
    Metric { metric: &'static str, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("design matrix is rank deficient and the ridge fallback is disabled")]
    RankDeficient,

    #[error("point ({}, {}, {}) lies outside the constraint box", .0[0], .0[1], .0[2])]
    OutOfBounds([f64; 3]),

    #[error("unknown response `{0}` (expected one of Ra, F, CWL, CWW, FW)")]
    UnknownResponse(String),

    #[error("grid of {size} points exceeds the evaluation budget of {budget}")]
    GridBudget { size: usize, budget: usize },

    #[error("R² is undefined in every sweep cell: {0}")]
    SweepUndefined(String),

    #[error("malformed document {path}: {reason}")]
    Document { path: PathBuf, reason: String },

    #[error("{context}: {source}")]
    Fit {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 2 usage, 3 data validation, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Header { .. }
            | Error::Parse { .. }
            | Error::Validation { .. }
            | Error::EmptyDataset
            | Error::Split { .. }
            | Error::Document { .. } => 3,
            Error::ConstantColumn { .. }
            | Error::Metric { .. }
            | Error::RankDeficient
            | Error::SweepUndefined(_) => 4,
            Error::InvalidParameter(_)
            | Error::UnknownResponse(_)
            | Error::OutOfBounds(_)
            | Error::GridBudget { .. } => 2,
            Error::Fit { source, .. } => source.exit_code(),
            Error::Write { .. } => 1,
        }
    }

    pub(crate) fn fit(context: impl Into<String>, source: Error) -> Self {
        Error::Fit {
            context: context.into(),
            source: Box::new(source),
        }
    }
}
