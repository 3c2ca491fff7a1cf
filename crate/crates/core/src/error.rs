use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),
    /// Input samples are unusable (non-finite values, empty arrays).
    #[error("data error: {0}")]
    Data(String),
    /// Caller violated a documented precondition (shapes, lengths, configuration).
    #[error("contract error: {0}")]
    Contract(String),
    /// A gas state is inadmissible.
    #[error("state error at step {step}, field {field}: {reason}")]
    State { step: usize, field: String, reason: String },
    /// The coordinate mapping is singular or otherwise unusable.
    #[error("mapping error: {0}")]
    Mapping(String),
    /// Post-processing analysis could not be carried out.
    #[error("analysis error: {0}")]
    Analysis(String),
    /// The exact Riemann solution would contain a vacuum.
    #[error("vacuum generated by the Riemann data")]
    Vacuum,
}

impl Error {
    pub(crate) fn state(field: &str, reason: impl Into<String>) -> Self {
        Error::State {
            step: 0,
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// Attach the time-step index to a state error.
    pub fn at_step(self, step: usize) -> Self {
        match self {
            Error::State { field, reason, .. } => Error::State { step, field, reason },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
