use thiserror::Error;

/// Errors raised across the library. Each variant maps onto a stable
/// process exit status used by the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive enumeration would exceed the configured cap.
    #[error("capacity error: C({p},{k}) = {count:.0} subsets exceeds the enumeration cap of {cap}")]
    Capacity { p: usize, k: usize, count: f64, cap: usize },

    /// A numerical routine failed to reach its target accuracy.
    #[error("numeric error: {message} (achieved error estimate {estimate:e})")]
    Numeric { message: String, estimate: f64 },

    /// Invalid command-line or configuration input.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// Process exit status: 2 usage, 3 numeric, 4 capacity, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Domain(_) => 2,
            Error::Numeric { .. } => 3,
            Error::Capacity { .. } => 4,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
