use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("in `{name}` {source}")]
    Parse {
        name: String,
        #[source]
        source: ParseError,
    },
    #[error("evaluating `{name}` at ({x}, {y}): {source}")]
    Eval {
        name: String,
        x: f64,
        y: f64,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Core(#[from] deltabound::Error),
}

impl HarnessError {
    /// Errors caused by the input rather than by the computation.
    pub fn is_config(&self) -> bool {
        !matches!(self, HarnessError::Core(_))
    }
}
