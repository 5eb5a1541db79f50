use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    /// Cost guards on exponential/factorial kernels. Opting in past the
    /// guard is a hard error, never a silent truncation.
    #[error("{what} = {got} exceeds the size limit {limit}")]
    SizeLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("out of domain: {0}")]
    Domain(String),

    /// Truncated series whose terms were still growing at the cutoff.
    #[error("series still diverging after {terms} terms (last term magnitude {last_term:e})")]
    SeriesDivergence { terms: usize, last_term: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
