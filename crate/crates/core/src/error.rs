use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid harmonic index (k={k}, l={l}): need |l| <= k")]
    InvalidIndex { k: usize, l: i64 },
    #[error("degree {k} exceeds the supported cap of {max}")]
    DegreeOverflow { k: usize, max: usize },
    #[error("non-finite integrand at quadrature node {index} ({x}, {y}, {z})")]
    NonFiniteIntegrand { index: usize, x: f64, y: f64, z: f64 },
    #[error("quadrature exactness {have} is below the required degree {need}")]
    InsufficientExactness { have: usize, need: usize },
    #[error("surface is not star-shaped: max |h a| = {max_abs} exceeds {limit}")]
    NotStarShaped { max_abs: f64, limit: f64 },
    #[error("kernel evaluated at coincident points")]
    Singular,
    #[error("non-finite Galerkin matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("cannot separate the degree-{k} multiplet: {reason}")]
    ClusterOverlap { k: usize, reason: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
