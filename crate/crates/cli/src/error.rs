use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    ConfigParse(String),

    #[error("{0}")]
    MissingInput(String),

    /// A core error raised while reading or validating an input.
    #[error("{0}")]
    Input(epschain::Error),

    #[error("{0}")]
    Operation(epschain::Error),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::ConfigParse(_) => "ConfigParse",
            CliError::MissingInput(_) => "MissingInput",
            CliError::Input(e) | CliError::Operation(e) => e.code(),
            CliError::Output(_) => "OutputWrite",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigParse(_) | CliError::MissingInput(_) | CliError::Input(_) => 2,
            CliError::Operation(_) => 3,
            CliError::Output(_) => 4,
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport { schema: 1, error: ErrorBody { code: self.code(), message: self.to_string() } }
    }
}

impl From<epschain::Error> for CliError {
    fn from(e: epschain::Error) -> Self {
        CliError::Operation(e)
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub schema: u32,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;
