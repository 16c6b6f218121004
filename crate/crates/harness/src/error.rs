use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Malformed config file or flag combination; maps to exit code 2.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] vclab_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core(vclab_core::Error::InvalidArgument(_))
            | HarnessError::Core(vclab_core::Error::NotPrime(_))
            | HarnessError::Core(vclab_core::Error::Polynomial(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}
