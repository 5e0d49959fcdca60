use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<cavity_raman::Error> for CliError {
    fn from(e: cavity_raman::Error) -> Self {
        match e {
            cavity_raman::Error::Domain(d) => CliError::Config(d.to_string()),
            cavity_raman::Error::Numerical(n) => CliError::Numerical(n.to_string()),
        }
    }
}

impl From<cavity_raman::DomainError> for CliError {
    fn from(e: cavity_raman::DomainError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}
