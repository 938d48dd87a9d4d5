use std::path::PathBuf;

/// Failure of a CLI workflow. Each variant owns one process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("verification failed: {failed} of {total} checks did not pass")]
    VerifyFailed { failed: usize, total: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub const EXIT_VERIFY: u8 = 1;
    pub const EXIT_VALIDATION: u8 = 2;
    pub const EXIT_NUMERICAL: u8 = 3;
    pub const EXIT_IO: u8 = 4;

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed { .. } => Self::EXIT_VERIFY,
            CliError::Validation(_) => Self::EXIT_VALIDATION,
            CliError::Numerical(_) => Self::EXIT_NUMERICAL,
            CliError::Io { .. } => Self::EXIT_IO,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<nlvn_core::Error> for CliError {
    fn from(e: nlvn_core::Error) -> Self {
        use nlvn_core::Error as E;
        match e {
            // Things that go wrong while evaluating otherwise valid inputs.
            E::NonFinite
            | E::NotHermitian { .. }
            | E::NotPositive { .. }
            | E::BadTrace { .. }
            | E::Domain { .. }
            | E::DegenerateNormalization { .. }
            | E::PositivityLost { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
