use doodler_core::ErrorCategory;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: doodler_core::Error,
    },

    #[error(transparent)]
    Core(#[from] doodler_core::Error),
}

impl CliError {
    /// 0 success, 1 usage/config, 2 data, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        let category = match self {
            CliError::Config(_) | CliError::Usage(_) => return 1,
            CliError::Context { source, .. } => source.category(),
            CliError::Core(e) => e.category(),
        };
        match category {
            ErrorCategory::Usage => 1,
            ErrorCategory::Data => 2,
            ErrorCategory::Numeric => 3,
        }
    }
}

pub trait Context<T> {
    fn context(self, f: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> Context<T> for doodler_core::Result<T> {
    fn context(self, f: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Context { context: f(), source })
    }
}
