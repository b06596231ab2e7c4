use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    /// A value exceeded one of the fixed computation budgets.
    #[error("out of range ({budget}): {detail}")]
    Range { budget: &'static str, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("certificate failure [{identity}]: {detail}")]
    CertificateFailure { identity: String, detail: String },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn range(budget: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            budget,
            detail: detail.into(),
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn certificate(identity: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::CertificateFailure {
            identity: identity.into(),
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag used by the CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::NoSolution(_) => "no-solution",
            Error::Range { .. } => "range",
            Error::Precondition(_) => "precondition",
            Error::Unsupported(_) => "unsupported",
            Error::CertificateFailure { .. } => "certificate-failure",
            Error::Parse { .. } => "parse",
        }
    }
}
