//! Crate-wide error type, with the CLI exit-code classification attached.

use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Errors fall into three classes, surfaced by [`Error::exit_code`]:
/// input problems (bad files, bad arguments, preconditions) exit 2,
/// numeric failures (overflow, singular systems) exit 3, and a
/// differentially-private sampler that exhausts its draw budget exits 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// CSV cell that failed to parse; row is 1-based counting the header.
    #[error("{path}: row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("{path}: no data rows")]
    EmptyData { path: PathBuf },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Stratification needs both classes present.
    #[error("cannot stratify folds: every example has label {label:+}")]
    SingleClass { label: i8 },

    /// Rado column with zero maximum magnitude; such features carry no
    /// usable edge and are excluded from weak-learner selection.
    #[error("feature {feature} has zero maximum magnitude over the rado set")]
    ZeroColumn { feature: usize },

    #[error("no usable feature: every column has zero maximum magnitude")]
    NoUsableFeature,

    /// The capped weak learner found no feature with |edge| ≤ lambda.
    #[error("no feature edge within lambda = {lambda}")]
    EmptyFeasibleSet { lambda: f64 },

    /// Exhaustive enumeration requested beyond the configured cap.
    #[error("enumerating 2^{m} signatures exceeds the cap 2^{limit}")]
    EnumerationLimit { m: usize, limit: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The differentially-private sampler requires a 0/1 feature column.
    #[error("feature {feature} is not boolean: row {row} holds {value}")]
    NonBooleanFeature {
        feature: usize,
        row: usize,
        value: f64,
    },

    /// Rejection sampling exceeded its draw budget (bound × safety factor).
    #[error(
        "draw budget exhausted after {drawn} draws: accepted {accepted} of {needed} \
         requested rados (budget {budget}); the acceptance interval admits too little mass"
    )]
    DrawBudget {
        drawn: u64,
        budget: u64,
        accepted: usize,
        needed: usize,
    },

    /// Edge recovery needs at least m independent rados.
    #[error(
        "edge recovery is underdetermined: effective rank {rank} < {m} examples \
         (need n ≥ m rados with full-rank selection)"
    )]
    Underdetermined { rank: usize, m: usize },
}

impl Error {
    /// Process exit code the CLI maps this error to:
    /// 2 input error, 3 numeric failure, 4 draw-budget abort.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) | Error::Underdetermined { .. } => 3,
            Error::DrawBudget { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(
            Error::InvalidInput("x".into()).exit_code(),
            2,
            "input errors exit 2"
        );
        assert_eq!(
            Error::Numeric("overflow".into()).exit_code(),
            3,
            "numeric failures exit 3"
        );
        assert_eq!(
            Error::Underdetermined { rank: 3, m: 5 }.exit_code(),
            3,
            "singular recovery is a numeric failure"
        );
        assert_eq!(
            Error::DrawBudget {
                drawn: 10,
                budget: 10,
                accepted: 0,
                needed: 5
            }
            .exit_code(),
            4,
            "draw-budget aborts exit 4"
        );
    }
}
