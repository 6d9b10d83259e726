use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] zpcqkd_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("oracle verification failed")]
    VerificationFailed,
}

impl CliError {
    /// Process exit status: 1 config/IO, 2 domain, 3 solver, 4 failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Core(e) if e.is_solver_error() => 3,
            CliError::Core(zpcqkd_core::Error::GridTooLarge { .. } | zpcqkd_core::Error::UnknownParameter(_)) => 1,
            CliError::Core(_) => 2,
            CliError::VerificationFailed => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
