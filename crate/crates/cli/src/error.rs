use thiserror::Error;

/// Everything that ends a run with exit status 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Input { line: usize, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(line: usize, message: impl Into<String>) -> Self {
        CliError::Input {
            line,
            message: message.into(),
        }
    }
}
