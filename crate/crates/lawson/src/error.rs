//! Command-level errors and their exit codes.

use lawson_core::Error;
use serde_json::json;
use thiserror::Error as ThisError;

/// Failure of a command, mapped to a stable exit code.
#[derive(Debug, ThisError)]
pub enum CliError {
    /// Bad arguments or configuration (exit 1).
    #[error("usage: {0}")]
    Usage(String),
    /// File or serialization failure (exit 1).
    #[error("io: {0}")]
    Io(String),
    /// Numerical failure from the core.
    #[error(transparent)]
    Core(#[from] Error),
    /// Validation checks failed (exit 1).
    #[error("{0} check(s) failed")]
    Checks(usize),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    /// 0 success, 1 usage or IO, 2 divergence, 3 unitarizability, 4 geometry.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Diverged { .. }) => 2,
            CliError::Core(Error::Unitarizability { .. }) => 3,
            CliError::Core(Error::Geometry { .. } | Error::Factorization { .. }) => 4,
            _ => 1,
        }
    }

    /// Machine-readable form for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Checks(_) => "checks",
            CliError::Core(e) => match e {
                Error::Diverged { .. } => "diverged",
                Error::Unitarizability { .. } => "unitarizability",
                Error::Geometry { .. } => "geometry",
                Error::Factorization { .. } => "factorization",
                _ => "numerics",
            },
        };
        let mut v = json!({ "error": kind, "message": self.to_string(), "exit_code": self.exit_code() });
        if let CliError::Core(Error::Diverged { history, .. }) = self {
            v["residual_history"] = json!(history);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let d = CliError::Core(Error::Diverged { history: vec![1.0, 0.5], reason: "x".into() });
        assert_eq!(d.exit_code(), 2);
        assert_eq!(d.to_json()["residual_history"][1], 0.5);
        assert_eq!(CliError::Core(Error::Unitarizability { reason: "x".into() }).exit_code(), 3);
        assert_eq!(CliError::Core(Error::Geometry { reason: "x".into() }).exit_code(), 4);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }
}
