use std::fmt;
use std::process::ExitCode;

/// Failure of a command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit 2).
    Config(String),
    /// The computation failed (exit 3).
    Numeric(String),
    /// Files could not be read or written (exit 4).
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<adaptive_hermite::Error> for CliError {
    fn from(e: adaptive_hermite::Error) -> Self {
        use adaptive_hermite::Error as E;
        match e {
            E::InvalidArgument(_) => CliError::Config(e.to_string()),
            E::Overflow(_) | E::Quadrature(_) | E::Numeric(_) => CliError::Numeric(e.to_string()),
            E::Cache(_) | E::Io(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
