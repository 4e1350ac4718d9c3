use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent caller input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A numerical kernel failed to converge.
    #[error("numerical failure: {what} (after {iterations} iterations)")]
    Numerical { what: String, iterations: usize },

    /// A generating set handed to an operation that requires a Groebner
    /// basis failed Buchberger's criterion.
    #[error("not a Groebner basis: S-polynomial of generators {0} and {1} does not reduce to zero")]
    NotGroebner(usize, usize),

    /// An internal invariant was violated.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
