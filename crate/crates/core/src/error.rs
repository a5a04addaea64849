use thiserror::Error;

use crate::cover::ViolationCertificate;
use crate::d_interval::HypothesisFailure;
use crate::exact_math::RatPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point {0} does not lie in the polytope")]
    NotInPolytope(RatPoint),

    #[error("({0}, {1}) is not an edge of the triangulation")]
    NotAnEdge(usize, usize),

    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    /// The membership oracle admits no label at some point; the cover hypothesis fails there.
    #[error("cover violation at {}", .0.point)]
    CoverViolation(Box<ViolationCertificate>),

    #[error("piercing hypothesis fails for color subset {:?}", .0.subset)]
    HypothesisViolation(Box<HypothesisFailure>),

    #[error("{what}: size cap {cap} exceeded (found {found})")]
    CapExceeded { what: &'static str, cap: usize, found: usize },

    #[error("{what}: iteration cap {cap} exceeded")]
    IterationCap { what: &'static str, cap: usize },

    #[error("LP is unbounded")]
    Unbounded,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
