use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a map.
    #[error("{what}: argument {value} outside [0, {endpoint})")]
    Domain {
        what: &'static str,
        value: f64,
        endpoint: f64,
    },
    /// A nodal value reached or crossed the endpoint of a transform.
    #[error("{what}: node {node} has value {value} outside [0, {endpoint})")]
    NodeDomain {
        what: &'static str,
        node: usize,
        value: f64,
        endpoint: f64,
    },
    /// Evaluation overflowed.
    #[error("{0}: value is not finite")]
    InfiniteValue(&'static str),
    /// Input data failed validation.
    #[error("validation failed: {0}")]
    Validation(String),
    /// A precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A singular mass is forbidden on one side of the correspondence.
    #[error("singular mass forbidden: {0}")]
    Forbidden(String),
    /// A numerical procedure failed to produce a trustworthy answer.
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}, error {error:e})")]
    Quadrature { tol: f64, estimate: f64, error: f64 },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {message}")]
    Csv { path: String, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn solver(msg: impl Into<String>) -> Self {
        Error::Solver(msg.into())
    }

    /// True for errors caused by the caller's input rather than by a
    /// numerical breakdown.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::NodeDomain { .. }
                | Error::Validation(_)
                | Error::Precondition(_)
                | Error::Forbidden(_)
                | Error::Csv { .. }
                | Error::Io { .. }
        )
    }
}
