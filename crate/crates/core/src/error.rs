use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Fatal errors. Row-level problems are never raised here; they are collected
/// in [`crate::ingest::ParseReport`] instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{source_name}: missing required column `{column}` (accepted names: {accepted}; header: {header})")]
    MissingColumn {
        source_name: String,
        column: String,
        accepted: String,
        header: String,
    },

    #[error("{source_name}: line {line}: {message}")]
    Format {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("{count} citing id(s) absent from the patent table, e.g. {}", .sample.join(", "))]
    UnknownCitingIds { count: usize, sample: Vec<String> },

    #[error("graph cache: {0}")]
    Cache(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
