use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver suite.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid customer id {0}")]
    InvalidCustomer(usize),

    #[error("route is empty")]
    EmptyRoute,

    #[error("routes do not partition the customer set: {0}")]
    NotAPartition(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("customer {0} cannot be served even on a route of its own")]
    UnservableCustomer(usize),

    #[error("invalid chromosome: {0}")]
    InvalidChromosome(String),

    #[error("invalid class string, field {field}: {message}")]
    SpecParse { field: usize, message: String },

    #[error("instance file, line {line}: {message}")]
    InstanceParse { line: usize, message: String },

    #[error("front file, line {line}: {message}")]
    FrontParse { line: usize, message: String },

    #[error("cannot generate instance: {0}")]
    Generation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("could not build {wanted} distinct individuals within {draws} draws")]
    PopulationExhausted { wanted: usize, draws: usize },

    #[error("front is empty")]
    EmptyFront,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
