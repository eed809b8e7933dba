use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("empty field: {0}")]
    EmptyField(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("model violates the pattern-width bound: {0}")]
    ModelBound(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
