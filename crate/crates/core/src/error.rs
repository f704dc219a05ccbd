use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised while loading inputs or computing scores.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: file is empty")]
    EmptyFile { path: PathBuf },

    #[error("duplicate key `{key}` in {path}")]
    DuplicateKey { path: PathBuf, key: String },

    #[error("missing key `{0}`")]
    MissingKey(String),

    #[error("invalid lexicon: {0}")]
    Lexicon(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("vector has zero norm")]
    ZeroNorm,

    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("{0}")]
    InvalidInput(String),

    #[error("missing upstream artifact {path}; run `{subcommand}` first")]
    MissingArtifact { path: PathBuf, subcommand: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Input errors (schema, coverage, lexicon) as opposed to runtime failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::EmptyFile { .. }
                | Error::DuplicateKey { .. }
                | Error::MissingKey(_)
                | Error::Lexicon(_)
                | Error::Config(_)
        )
    }

    /// Short machine-readable code used in diagnostic records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::EmptyFile { .. } => "empty_file",
            Error::DuplicateKey { .. } => "duplicate_key",
            Error::MissingKey(_) => "missing_key",
            Error::Lexicon(_) => "lexicon",
            Error::Config(_) => "config",
            Error::ZeroNorm => "zero_norm",
            Error::LengthMismatch(..) => "length_mismatch",
            Error::InvalidInput(_) => "invalid_input",
            Error::MissingArtifact { .. } => "missing_artifact",
        }
    }
}
