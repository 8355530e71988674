use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerics(hierdecay::Error),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerics(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl From<hierdecay::Error> for CliError {
    fn from(e: hierdecay::Error) -> Self {
        use hierdecay::Error as E;
        match e {
            // Bad inputs, not failed numerics.
            E::InvalidParameter { .. }
            | E::ContinuumTooCoarse { .. }
            | E::BeyondRecurrence { .. }
            | E::DimensionCap { .. }
            | E::Parse(_)
            | E::Io(_) => CliError::Config(e.to_string()),
            E::Realization { ref source, .. } if matches!(**source, E::InvalidParameter { .. }) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerics(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}
