use thiserror::Error;

/// Errors returned by the library.
///
/// `Domain` covers inputs outside the region where a formula is defined.
/// The CLI maps every variant except `Usage` and `Parse` to exit code 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no landing point: {0}")]
    NoLanding(String),
    #[error("singular vector field: {0}")]
    Singular(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("no exit before node: {0}")]
    NoExit(String),
    #[error("non-convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("indeterminate classification: {0}")]
    Indeterminate(String),
    #[error("invalid bracket: {0}")]
    Bracket(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
