use thiserror::Error;

/// Failures shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The tracked error bound grew past what the requested answer tolerates.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("value is rational: {0}")]
    Rational(String),

    #[error("every candidate direction is rational (searched |a|, |c| <= {bound})")]
    AllRational { bound: u64 },

    #[error("alpha is indistinguishable from zero at the working precision")]
    AlphaZero,

    #[error("division by a value indistinguishable from zero")]
    DivisionByZero,

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("enumeration bound {requested} exceeds the cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    /// A reported solution failed independent re-verification.
    #[error("soundness check failed: {0}")]
    Soundness(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
