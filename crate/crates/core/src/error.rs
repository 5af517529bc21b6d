use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertex set {set:?} is not acyclic")]
    NotAcyclic { set: Vec<usize> },

    #[error("{what}: size {actual} exceeds the configured bound {limit}")]
    SizeBound {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    #[error("graph has loops on {0:?}")]
    LoopsPresent(Vec<usize>),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn bound(what: &'static str, limit: u64, actual: u64) -> Self {
        Error::SizeBound {
            what,
            limit,
            actual,
        }
    }

    /// True for errors caused by a configured resource cap rather than bad input.
    pub fn is_resource_bound(&self) -> bool {
        matches!(self, Error::SizeBound { .. })
    }
}
