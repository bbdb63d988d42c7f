//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("covariate file is missing required column '{column}'")]
    MissingColumn { column: String },

    #[error("line {line}: {message}")]
    InvalidRow { line: u64, message: String },

    #[error("duplicate household id {household_id} in village {village_id}")]
    DuplicateHousehold { village_id: u32, household_id: u32 },

    #[error("village {village_id} has {n} household(s); a network needs at least 2")]
    VillageTooSmall { village_id: u32, n: usize },

    #[error("village {village_id} has {n} households; the bitset network representation caps villages at 64")]
    VillageTooLarge { village_id: u32, n: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("gender convention 'exclusive' cannot code household {household_id} in village {village_id}: it has both a boy and a girl")]
    MixedGenderHousehold { village_id: u32, household_id: u32 },

    #[error("individual-level regressors are not allowed in the symmetric '{term}' term: {names:?}")]
    SymmetryViolation { term: char, names: Vec<String> },

    #[error("parameter vector does not match feature dimensions: {0}")]
    DimensionMismatch(String),

    #[error("statistic '{statistic}' is undefined for this network: {reason}")]
    UndefinedStatistic {
        statistic: &'static str,
        reason: String,
    },

    #[error("node indices must differ: got ({0}, {0})")]
    DiagonalEntry(usize),

    #[error("logit design column '{column}' appears to be separated (coefficient diverged past {limit})")]
    Separation { column: String, limit: f64 },

    #[error("logit did not converge after {iterations} iterations (max gradient {grad_norm:e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },

    #[error("chain diverged at iteration {iteration}: non-finite potential at beta {beta:?}")]
    DivergedChain { iteration: usize, beta: Vec<f64> },

    #[error("checkpoint at {path} was written by a different configuration (hash {found}, expected {expected})")]
    CheckpointMismatch {
        path: PathBuf,
        found: String,
        expected: String,
    },

    #[error("posterior chain is empty; run fit-ergm first")]
    EmptyPosterior,

    #[error("malformed chain trace {path}: {message}")]
    BadTrace { path: PathBuf, message: String },

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
