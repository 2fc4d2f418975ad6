use std::path::PathBuf;
use std::process::ExitCode;

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("decode {path}: {message}")]
    Decode { path: PathBuf, message: String },
    #[error("fit: {0}")]
    Fit(colorcurve::Error),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Decode { .. } => 3,
            CliError::Fit(_) => 4,
            CliError::Internal(_) => 5,
        })
    }

    pub fn decode(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Decode {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl From<colorcurve::Error> for CliError {
    fn from(e: colorcurve::Error) -> Self {
        use colorcurve::Error as E;
        match e {
            E::DegenerateInput(_) | E::IllConditioned { .. } => CliError::Fit(e),
            E::InvalidParameter(_) | E::UnsupportedMethod(_) => CliError::Config(e.to_string()),
            E::InvalidImage(ref m) | E::MalformedDocument(ref m) => CliError::Decode {
                path: PathBuf::new(),
                message: m.clone(),
            },
            E::VersionMismatch { .. } => CliError::Decode {
                path: PathBuf::new(),
                message: e.to_string(),
            },
            E::MismatchedDimensions { .. } => CliError::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
