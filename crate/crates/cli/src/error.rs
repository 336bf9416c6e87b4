use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("config field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("checkpoint, line {line}: {message}")]
    Checkpoint { line: usize, message: String },
    #[error("unsupported checkpoint format version {found} (this build reads version {supported})")]
    CheckpointVersion { found: String, supported: u32 },
    #[error(transparent)]
    Core(#[from] freeprecode_core::Error),
}

impl CliError {
    pub fn field(field: &'static str, message: impl Into<String>) -> Self {
        Self::Field {
            field,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Field { .. } => 2,
            Self::Io { .. } | Self::Csv(_) => 3,
            Self::Checkpoint { .. } | Self::CheckpointVersion { .. } => 4,
            Self::Core(_) => 5,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
