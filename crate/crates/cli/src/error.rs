use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] protosel::Error),

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    /// Some methods of a comparison failed; the table was still written.
    #[error("{failed} of {total} methods failed")]
    Partial { failed: usize, total: usize },
}

impl CliError {
    /// 2 for bad invocations and unusable inputs, 1 for everything that
    /// went wrong while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Invalid(_) => 2,
            CliError::Core(e) if is_validation(e) => 2,
            _ => 1,
        }
    }
}

fn is_validation(e: &protosel::Error) -> bool {
    use protosel::Error::*;
    match e {
        Iteration { source, .. } => is_validation(source),
        Xml { .. } | MissingActivity { .. } | Csv(_) | Config(_) | Timestamp { .. } | Pnml(_) | InvalidK { .. }
        | EmptyLog | NegativeBeta(_) | PrototypeNotInLog(_) | InvalidNet(_) => true,
        _ => false,
    }
}
