use thiserror::Error;

/// Errors surfaced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {d} outside supported range [{lo}, {hi}]")]
    DimensionRange { d: usize, lo: usize, hi: usize },

    #[error("cap height {eta} outside [0, 1]")]
    EtaRange { eta: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid candidate set: {0}")]
    InvalidCandidate(String),

    #[error("inner parallel set at r = {r} is empty (inradius {inradius})")]
    EmptyInnerParallel { r: f64, inradius: f64 },

    #[error("tube radius {r} not below certified reach {reach}")]
    TubeRadius { r: f64, reach: f64 },

    #[error("estimator requires at least 2 sample points, got {n}")]
    TooFewPoints { n: usize },

    #[error("exact enumeration supports at most {max} vertices, got {n}; use the spectral sweep instead")]
    EnumerationBudget { n: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}
