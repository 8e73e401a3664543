use thiserror::Error;

/// Why a command stopped. Invalid configuration exits with 2, everything
/// else with 1.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Run(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Run(_) => 1,
        }
    }
}

pub fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

impl From<noisyqma::Error> for Failure {
    fn from(e: noisyqma::Error) -> Self {
        match e {
            noisyqma::Error::DenseCapExceeded { .. } | noisyqma::Error::EnumerationTooLarge { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}
