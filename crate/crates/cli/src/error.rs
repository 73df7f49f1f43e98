use std::fmt;
use std::path::Path;

/// A failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or values. Exit code 2.
    Usage(String),
    /// The request is well formed but the data cannot support it. Exit code 3.
    Domain(String),
    /// Reading, writing or decoding a file failed. Exit code 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<robustpr::Error> for CliError {
    fn from(e: robustpr::Error) -> Self {
        use robustpr::Error as E;
        match e {
            E::InvalidArgument(_) => CliError::Usage(e.to_string()),
            E::Parse(_) => CliError::Io(e.to_string()),
            E::FieldMismatch { .. }
            | E::DimensionMismatch(_)
            | E::UnsupportedField(_)
            | E::MissingData(_) => CliError::Domain(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
