use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Invalid(String),

    #[error("channels are not in the same class")]
    NotSameClass,

    #[error("did not converge; wrote the best iterate")]
    NotConverged,

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Lib(#[from] chanspoof::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use chanspoof::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Invalid(_) | CliError::NotSameClass => 3,
            CliError::NotConverged => 4,
            CliError::Io { .. } => 5,
            CliError::Lib(
                E::InvalidParameter(_)
                | E::InvalidDimension(_)
                | E::InvalidRank { .. }
                | E::GaugeOutOfRange(_)
                | E::InvalidProbabilities(_),
            ) => 2,
            CliError::Lib(_) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
