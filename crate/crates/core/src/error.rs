use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("eigensolver did not converge within {0} sweeps")]
    EigenNoConvergence(usize),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("design error: {0}")]
    Design(String),
    #[error("degenerate score: z'z = 0")]
    DegenerateScore,
    #[error("degenerate target: y'y = 0")]
    DegenerateTarget,
    #[error("invalid score: {0}")]
    InvalidScore(String),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid simulation config: {0}")]
    Config(String),
}

/// Coarse classification, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Design,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidData(_) | Error::Shape(_) | Error::EmptyInput | Error::Config(_) => {
                ErrorKind::Data
            }
            Error::Design(_) | Error::Dimension(_) | Error::InvalidScore(_) | Error::DegenerateTarget => {
                ErrorKind::Design
            }
            Error::EigenNoConvergence(_)
            | Error::Domain(_)
            | Error::Singular(_)
            | Error::DegenerateScore => ErrorKind::Numerical,
        }
    }
}
