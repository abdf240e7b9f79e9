//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("node has zero total weight")]
    ZeroTotalWeight,

    #[error("need at least two classes in the schema, got {0}")]
    TooFewClasses(usize),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("feature index {index} out of range for a row with {len} features")]
    FeatureOutOfRange { index: usize, len: usize },

    #[error("{mode:?} routing requires a {expected:?} tree, got {actual:?}")]
    ArchitectureMismatch {
        mode: crate::predict::RoutingMode,
        expected: crate::tree::Architecture,
        actual: crate::tree::Architecture,
    },

    #[error("undefined when the boundary-uncertain rate is zero")]
    ZeroUncertainRate,

    #[error("Bayes error must be positive, got {0}")]
    NonPositiveBayesError(f64),

    #[error("class distribution is invalid: {0}")]
    InvalidDistribution(String),

    #[error("predictions and labels have different lengths ({predictions} vs {labels})")]
    LengthMismatch { predictions: usize, labels: usize },

    #[error("classes too small for {k}-fold stratification: {}",
        offenders.iter().map(|(c, n)| format!("class {c} has {n} samples")).collect::<Vec<_>>().join(", "))]
    StratificationTooFew {
        k: usize,
        offenders: Vec<(usize, usize)>,
    },

    #[error("csv {path}: row {row}, column {column:?}: {message}")]
    CsvParse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("csv {path}: label column {column:?} not found in header")]
    MissingLabelColumn { path: PathBuf, column: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),

    #[error("model file is not a valid tree: {0}")]
    ModelParse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
