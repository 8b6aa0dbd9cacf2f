use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pole regularity violated: w({pole}) = {value} (expected 1)")]
    PoleRegularity { pole: f64, value: f64 },

    #[error("profile w is not positive at x = {x} (w = {value})")]
    NonPositiveProfile { x: f64, value: f64 },

    #[error("non-finite value while evaluating {what} at x = {x}")]
    NonFinite { what: &'static str, x: f64 },

    #[error("metric is not embeddable as a surface of revolution: {0}")]
    Embedding(String),

    /// The geometric input does not meet the curvature floor required by a
    /// pipeline. `reason` is a stable machine-readable tag.
    #[error("inadmissible input ({reason}): {detail}")]
    Admissibility { reason: &'static str, detail: String },

    /// A named inequality required before solving for a collar parameter.
    #[error("precondition {name} violated: {detail}")]
    Precondition { name: &'static str, detail: String },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("integration failed: {0}")]
    Integration(String),
}

impl Error {
    /// Stable tag used by the command line front end in machine-readable output.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::PoleRegularity { .. } => "pole_regularity",
            Error::NonPositiveProfile { .. } => "profile_nonpositive",
            Error::NonFinite { .. } => "non_finite",
            Error::Embedding(_) => "embedding_failure",
            Error::Admissibility { reason, .. } => reason,
            Error::Precondition { name, .. } => name,
            Error::RootFinding(_) => "root_finding",
            Error::Integration(_) => "integration",
        }
    }
}
