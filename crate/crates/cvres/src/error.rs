use thiserror::Error;

/// Failures mapped onto exit codes: usage and input problems give 1,
/// numerical problems give 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io(_) => 1,
            Self::Numerical(_) => 2,
        }
    }
}

impl From<cvres_core::Error> for CliError {
    fn from(e: cvres_core::Error) -> Self {
        match e {
            cvres_core::Error::Inconsistent { .. } => Self::Numerical(e.to_string()),
            other => Self::Usage(other.to_string()),
        }
    }
}
