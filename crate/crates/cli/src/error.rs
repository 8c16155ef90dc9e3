use std::fmt;

/// Failure classes, each with its own process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad parameter, malformed file or failed invariant in user input.
    Validation(String),
    /// An input file does not exist or cannot be read.
    MissingInput(String),
    /// Results disagree with themselves (failed cross-check or replay mismatch).
    Inconsistent(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::MissingInput(_) => 3,
            CliError::Inconsistent(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::MissingInput(m) => write!(f, "missing input: {m}"),
            CliError::Inconsistent(m) => write!(f, "internal inconsistency: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fecarbon::Error> for CliError {
    fn from(e: fecarbon::Error) -> Self {
        match e {
            fecarbon::Error::Io { .. } => CliError::MissingInput(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
