use edm_pareto::Error;
use serde_json::json;

/// Failures surfaced to the process boundary.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// `{"error":..,"exit_code":..,"message":..}` on a single line.
    pub fn to_line(&self) -> String {
        let message = self.to_string().replace(['\n', '\r'], " ");
        json!({"error": self.kind(), "exit_code": self.exit_code(), "message": message}).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::InvalidMeasure(_) | Error::TruncationCap { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
