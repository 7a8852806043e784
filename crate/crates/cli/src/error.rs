use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub field: String,
    pub message: String,
}

impl Issue {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration ({} issue(s))", .0.len())]
    Validation(Vec<Issue>),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Machine-readable form written to standard error.
    pub fn to_json(&self) -> String {
        let v = match self {
            CliError::Validation(issues) => serde_json::json!({"status": "invalid", "errors": issues}),
            CliError::Numerical(m) => serde_json::json!({"status": "check_failed", "message": m}),
            CliError::Io(m) => serde_json::json!({"status": "io_error", "message": m}),
        };
        v.to_string()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
