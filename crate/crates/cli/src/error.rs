use scoresphere::ErrorKind;

use crate::ingest::IngestError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    /// Bad command line (clap's own code).
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const DESIGN: i32 = 4;
    pub const NUMERICAL: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{context}: {source}")]
    Library {
        context: String,
        #[source]
        source: scoresphere::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn lib(context: impl Into<String>, source: scoresphere::Error) -> Self {
        CliError::Library { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Ingest(e) => e.exit_code(),
            CliError::Library { source, .. } => match source.kind() {
                ErrorKind::Data => exit::PARSE,
                ErrorKind::Design => exit::DESIGN,
                ErrorKind::Numerical => exit::NUMERICAL,
            },
            CliError::Usage(_) => exit::USAGE,
            CliError::Output { .. } | CliError::Serialize(_) => exit::OTHER,
        }
    }
}

/// Attaches a context string to library errors.
pub trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for scoresphere::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::lib(what, e))
    }
}
