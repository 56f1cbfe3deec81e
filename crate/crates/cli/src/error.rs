use bakerlab_core::BakerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, inconsistent dimensions, unreadable input: exit code 2.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A numerical precondition failed (non-unitary input, eigensolver): exit code 3.
    #[error("numerical precondition failed: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<BakerError> for CliError {
    fn from(e: BakerError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}
