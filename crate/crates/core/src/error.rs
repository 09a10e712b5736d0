use thiserror::Error;

use crate::numerics::RankDecision;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown variety spec `{0}`")]
    UnknownSpec(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Every sampled point produced an ambiguous rank decision.
    #[error("non-generic point: {context} (ambiguous after {attempts} attempts)")]
    NonGeneric {
        context: String,
        attempts: usize,
        audit: Vec<RankDecision>,
    },

    /// The Jacobi matrix at the base point of a leaf is singular.
    #[error("base point is singular on its leaf")]
    SingularBasePoint,

    /// The focus polynomial vanishes identically: every point of the leaf is singular.
    #[error("degenerate leaf: every point of the leaf line is singular")]
    DegenerateLeaf,

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("correlation matrix is singular (numerical rank {rank} < {expected})")]
    SingularCorrelation { rank: usize, expected: usize },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for failures that resampling at another point may cure.
    pub fn is_ambiguity(&self) -> bool {
        matches!(
            self,
            Error::NonGeneric { .. } | Error::Inconclusive(_) | Error::SingularBasePoint
        )
    }
}
