use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid mismatch: {left} cells vs {right} cells")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}` = {value}: {expected}")]
    Parameter {
        name: &'static str,
        value: f64,
        expected: String,
    },

    #[error("state kind mismatch: expected {expected}, got {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("singular partial Gramian: {0}")]
    Singular(String),

    #[error("unknown nonlinearity `{0}`")]
    UnknownNonlinearity(String),

    #[error("Picard iteration did not converge after {iterations} iterations (last gap {gap:e})")]
    PicardDivergence { iterations: usize, gap: f64 },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parameter(name: &'static str, value: f64, expected: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            value,
            expected: expected.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
