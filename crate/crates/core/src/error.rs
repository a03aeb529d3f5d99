use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A size limit of an enumeration or product was exceeded.
    #[error("capacity exceeded: {what} is {size}, limit {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    /// A partition-integral evaluation would visit more terms than allowed.
    #[error("term budget of {budget} exceeded")]
    Budget { budget: u64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    /// An input is well-formed but violates a mathematical precondition
    /// (for example a kernel that is not mirror-symmetric).
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
