use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the library. `InvalidInput` maps to CLI exit code 1,
/// `Incompatible` and `Internal` to exit code 2.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("class is not in the generalized image of the monodromy: {0}")]
    NotInGim(String),
    /// The orbit of a class under the monodromy never returns, so the class
    /// has no finite winding and no toroidal lift.
    #[error("no finite winding: {0}")]
    NoFinitePeriod(String),
    #[error("decomposition incompatible in degree {degree}: {check} ({detail})")]
    Incompatible {
        degree: usize,
        check: String,
        detail: String,
    },
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::NotACycle(_) | Error::NotInGim(_) | Error::NoFinitePeriod(_) => 1,
            Error::Incompatible { .. } | Error::Internal(_) => 2,
        }
    }
}
