use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid IRI `{0}`")]
    InvalidIri(String),

    #[error("unknown start vertex `{0}`")]
    UnknownStartVertex(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("`{0}` is not in the vocabulary")]
    UnknownToken(String),

    #[error("vector dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("training diverged at epoch {epoch}: {detail}")]
    Diverged { epoch: usize, detail: String },

    #[error("too few positives for {task}: found {found}, need at least {required}")]
    TooFewPositives {
        task: String,
        found: usize,
        required: usize,
    },

    #[error("training set contains a single class")]
    DegenerateTrainingSet,

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
