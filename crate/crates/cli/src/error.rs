use datscore::backend::BackendError;
use datscore::meta::MetaError;
use datscore::pipeline::PipelineError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid input, bad configuration.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Backend(String),
    #[error("{0}")]
    Insufficient(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Backend(_) => 3,
            CliError::Insufficient(_) => 4,
        }
    }
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        CliError::Backend(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let msg = e.to_string();
        match e {
            PipelineError::Augment { .. } | PipelineError::TooManyExclusions { .. } => CliError::Backend(msg),
            PipelineError::InsufficientData(_) => CliError::Insufficient(msg),
            PipelineError::InvalidDirections(_) | PipelineError::WeightMismatch(_) => CliError::Input(msg),
        }
    }
}

impl From<MetaError> for CliError {
    fn from(e: MetaError) -> Self {
        match e {
            MetaError::Pipeline(p) => p.into(),
            MetaError::InsufficientData(_) | MetaError::ZeroVariance(_) => CliError::Insufficient(e.to_string()),
            MetaError::NonFinite | MetaError::InvalidConfig(_) => CliError::Input(e.to_string()),
        }
    }
}
