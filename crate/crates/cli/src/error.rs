use std::fmt;

/// Tool-level errors with process exit codes: 2 for parse errors, 3 for
/// invalid arguments, 4 for pipeline and I/O failures.
#[derive(Debug)]
pub enum CliError {
    Parse { line: usize, msg: String },
    Invalid(String),
    Pipeline(wicross_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        CliError::Parse { line, msg: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Invalid(_) => 3,
            CliError::Pipeline(wicross_core::Error::InvalidArgument(_)) => 3,
            CliError::Pipeline(_) => 4,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            CliError::Invalid(msg) => write!(f, "invalid arguments: {msg}"),
            CliError::Pipeline(e) => write!(f, "pipeline error: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Pipeline(e) => Some(e),
            CliError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<wicross_core::Error> for CliError {
    fn from(e: wicross_core::Error) -> Self {
        CliError::Pipeline(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
