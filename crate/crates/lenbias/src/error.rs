use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input data (CSV records, width bounds, empty strata).
    #[error("invalid data: {0}")]
    Data(String),

    /// CSV parse failure with a 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Bad run configuration (flags, config file, missing paths).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A computation lost all numerical mass or met an impossible state.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code contract: 2 for configuration/data problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
