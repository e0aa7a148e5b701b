use thiserror::Error;

/// Errors raised by the channel, relay, routing and harness layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input fell outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),
    /// The link or path cannot meet its target with the available resources.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// No path from the source reaches any sink.
    #[error("no route from source to any sink")]
    NoRoute,
    /// An iterative solver exhausted its budget.
    #[error("solver failure: {0}")]
    Solver(String),
    /// A configuration key is malformed or out of range.
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
