use std::path::PathBuf;

/// Failures mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Check(String),
    #[error(transparent)]
    Solver(#[from] sharpfront::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use sharpfront::Error as E;
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Csv { .. } => 2,
            CliError::Solver(E::Config(_) | E::Input(_) | E::Domain(_)) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
