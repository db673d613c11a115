use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// `Input` covers malformed or precondition-violating arguments. `Resource`
/// means a configured budget was exceeded, which says nothing about the
/// answer itself.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("resource error: {budget} budget of {limit} exceeded")]
    Resource { budget: &'static str, limit: usize },
    #[error("unresolved: {0}")]
    Unresolved(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
