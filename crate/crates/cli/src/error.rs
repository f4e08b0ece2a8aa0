use gns_core::GnsError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Gns(#[from] GnsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for usage and configuration problems, 2 when a computation could not be completed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) | CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Gns(e) => match e {
                GnsError::EnclosureFailure(_)
                | GnsError::TooLarge { .. }
                | GnsError::StepCapExceeded(_)
                | GnsError::Internal(_) => 2,
                _ => 1,
            },
        }
    }
}
