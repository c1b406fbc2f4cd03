use std::path::PathBuf;
use std::process::ExitCode;

use lis_crlb::Error as ModelError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) | CliError::Output { .. } => ExitCode::from(2),
            CliError::Model(e) if is_input_error(e) => ExitCode::from(2),
            CliError::Model(_) | CliError::Csv(_) => ExitCode::from(3),
        }
    }
}

/// Errors caused by the arguments rather than by the numerics.
fn is_input_error(e: &ModelError) -> bool {
    matches!(
        e,
        ModelError::InvalidParameter { .. }
            | ModelError::InvalidSplit(_)
            | ModelError::Unsupported(_)
    )
}
