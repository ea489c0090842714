use thiserror::Error;

/// Failure modes shared by the solver and simulation modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The configuration admits no price comparisons (for example `t(1) = 1`,
    /// or every consumer searches immediately), so the markup ratio is
    /// undefined.
    #[error("no price comparisons possible: {0}")]
    NoComparison(String),
    /// The requested parameters support only the no-trade outcome.
    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),
    /// A computation produced non-finite intermediate values.
    #[error("numerical divergence: {0}")]
    Diverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
