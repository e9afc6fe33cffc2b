use std::path::PathBuf;

use crate::config::ConfigErrors;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NUMERIC: i32 = 2;
    pub const IO: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigErrors),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ssqc_core::Error),
    #[error("{failed} of {total} sweep points failed")]
    PartialSweep { failed: usize, total: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use ssqc_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Usage(_) => exit::CONFIG,
            CliError::Io { .. } => exit::IO,
            CliError::PartialSweep { .. } => exit::NUMERIC,
            CliError::Core(e) => match e {
                E::NonFinite { .. } | E::TrajectoryTooShort { .. } | E::TooFewPoints { .. } => {
                    exit::NUMERIC
                }
                _ => exit::CONFIG,
            },
        }
    }
}
