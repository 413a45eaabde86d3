use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),

    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),

    #[error("invalid preference function: {0}")]
    InvalidPreferenceFunction(String),

    #[error("invalid decision matrix: {0}")]
    InvalidMatrix(String),

    #[error("all criterion weights are zero")]
    ZeroWeights,

    #[error("alternative `{0}` cannot be compared with itself")]
    SelfComparison(String),

    #[error("at least {needed} alternatives required, found {found}")]
    TooFewAlternatives { needed: usize, found: usize },

    #[error("criterion `{0}` has zero observed range; discordance is undefined")]
    ZeroRange(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid ELECTRE thresholds: {0}")]
    InvalidThresholds(String),

    #[error("invalid preference index matrix: {0}")]
    InvalidPreferenceMatrix(String),

    #[error("invalid condition: {0}")]
    InvalidCondition(String),

    #[error("invalid portfolio: {0}")]
    InvalidPortfolio(String),

    #[error("invalid GA configuration: {0}")]
    InvalidGaConfig(String),

    #[error("empty population")]
    EmptyPopulation,

    #[error("{path}: line {line}, column `{column}`: {message}")]
    Parse {
        path: String,
        line: u64,
        column: String,
        message: String,
    },

    #[error("{path}: {message}")]
    File { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn file(path: impl ToString, message: impl ToString) -> Self {
        Error::File {
            path: path.to_string(),
            message: message.to_string(),
        }
    }
}
