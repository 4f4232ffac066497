use lfsm_core::LfsmError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config, or input data.
    #[error("{message}")]
    Input { message: String, row: Option<u64> },
    /// Estimation, decomposition or quadrature failure.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input { message: message.into(), row: None }
    }

    pub fn at_row(row: u64, message: impl Into<String>) -> Self {
        CliError::Input { message: format!("row {row}: {}", message.into()), row: Some(row) }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }

    /// One-line JSON record written to standard error.
    pub fn record(&self) -> String {
        let (kind, row) = match self {
            CliError::Input { row, .. } => ("input", *row),
            CliError::Numerical(_) => ("numerical", None),
        };
        let mut v = json!({
            "status": "error",
            "kind": kind,
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let Some(row) = row {
            v["row"] = json!(row);
        }
        v.to_string()
    }
}

impl From<LfsmError> for CliError {
    fn from(e: LfsmError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::input(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
