use thiserror::Error;

/// Failures surfaced by the command line, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, override, or input path. Exit code 2.
    #[error("{0}")]
    Config(String),
    /// Inputs parsed but the run could not be set up or written. Exit code 3.
    #[error("{0}")]
    Setup(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Setup(_) => 3,
        }
    }
}
