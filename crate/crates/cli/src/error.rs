use thiserror::Error;

use qmc_hyperinterp::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("impossible request: {0}")]
    Impossible(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// Process exit status: 2 configuration, 3 impossibility, 4 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Impossible(_) => 3,
            CliError::Resource(_) => 4,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::ReconstructionImpossible { .. } => CliError::Impossible(e.to_string()),
            CoreError::CardinalityCap { .. } => CliError::Resource(e.to_string()),
            CoreError::Numerical(_) | CoreError::NoIrreducible(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
