use thiserror::Error;

use crate::point::Space;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("vertex {index} is not finite")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point is not in {space} (residual {residual:e})")]
    NotInManifold { space: Space, residual: f64 },

    #[error("point lies outside chart U_{k}; admissible charts: {admissible:?}")]
    ChartDomain { k: usize, admissible: Vec<usize> },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{j} is not a proper divisor of {n}")]
    NotProperDivisor { n: usize, j: usize },

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("curve is not a geodesic (residual {residual:e})")]
    NotGeodesic { residual: f64 },

    #[error("base geodesic is a straight line; the lift needs a curved one")]
    StraightLine,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed polygon JSON: {0}")]
    Parse(String),
}
