use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad model file or flags.
    #[error("{0}")]
    Spec(String),
    #[error(transparent)]
    Numeric(subordination::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<subordination::Error> for CliError {
    fn from(e: subordination::Error) -> Self {
        use subordination::Error as E;
        match e {
            E::InvalidParameter(_) | E::ConfigError(_) => CliError::Spec(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}
