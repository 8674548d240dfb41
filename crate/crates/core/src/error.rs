use thiserror::Error;

/// Errors raised by lattice, model, engine and circuit operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("site index {index} out of range for {n_sites} sites")]
    SiteOutOfRange { index: usize, n_sites: usize },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("state not representable in basis: {0}")]
    NotRepresentable(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("dimension {dimension} exceeds guard {limit} for {what}")]
    GuardExceeded {
        what: &'static str,
        dimension: usize,
        limit: usize,
    },

    #[error("propagator did not converge within {max_substeps} substeps")]
    NonConvergence { max_substeps: usize },

    #[error("norm drift {drift:e} exceeds renormalization threshold")]
    NormDrift { drift: f64 },

    #[error("invalid state norm {0}")]
    InvalidNorm(f64),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
