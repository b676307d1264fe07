use std::io;
use std::path::PathBuf;

pub type Result<T, E = ForgeError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum ForgeError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] idiomforge_core::Error),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl ForgeError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        ForgeError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl ToString) -> Self {
        ForgeError::Parse {
            path: path.into(),
            line,
            message: message.to_string(),
        }
    }

    /// 2 config, 3 input, 4 internal invariant.
    pub fn exit_code(&self) -> i32 {
        use idiomforge_core::Error as Core;
        match self {
            ForgeError::Config(_) => 2,
            ForgeError::Core(
                Core::InvalidPercent(_)
                | Core::InvalidRate(_)
                | Core::InvalidAugmentationCount
                | Core::InvalidInferenceCount(_)
                | Core::UnsupportedCombination,
            ) => 2,
            ForgeError::Io { .. } | ForgeError::Parse { .. } | ForgeError::Input(_) | ForgeError::Core(_) => 3,
            ForgeError::Invariant(_) => 4,
        }
    }
}
