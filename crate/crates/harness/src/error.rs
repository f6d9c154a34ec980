use thiserror::Error;

/// Failures of the harness, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Configuration or command-line input rejected; names the field.
    #[error("invalid `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] trunc_ivp_core::Error),
    /// A runtime consistency check inside an experiment failed.
    #[error("check failed: {0}")]
    Check(String),
    #[error("acceptance failed: {0}")]
    Acceptance(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        HarnessError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code: 1 validation, 2 numerical failure, 3 acceptance
    /// failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } | HarnessError::Json(_) => 1,
            HarnessError::Acceptance(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
