use thiserror::Error;

use crate::io::newick::NewickError;
use crate::shape::fmatrix::Violation;
use crate::shape::hetero::HeteroViolation;

/// Errors produced by the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A functional code broke one of its defining properties.
    #[error("invalid shape code at position {index}: {reason}")]
    InvalidCode { index: usize, reason: &'static str },
    #[error("invalid F-matrix: {0}")]
    InvalidFMatrix(Violation),
    #[error("invalid heterochronous code: {0}")]
    InvalidHeteroCode(HeteroViolation),
    /// Two objects with a different number of leaves were combined.
    #[error("dimension mismatch: {left} leaves vs {right} leaves")]
    DimensionMismatch { left: usize, right: usize },
    /// Exhaustive enumeration was requested past the configured cap.
    #[error("enumeration of n = {n} exceeds the cap of {cap} leaves; use simulated annealing")]
    CapacityExceeded { n: usize, cap: usize },
    #[error("invalid event times: {0}")]
    InvalidTimes(String),
    #[error("empty sample")]
    EmptySample,
    #[error("heterogeneous sample: {0}")]
    Heterogeneous(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The covariance used for standardization has rank zero.
    #[error("covariance has rank zero; the sample carries no variation on free coordinates")]
    RankZero,
    #[error("{0}")]
    Newick(#[from] NewickError),
    /// Internal node times that cannot be ordered within the tolerance.
    #[error("ambiguous ranking: internal node times {0} and {1} are tied within tolerance")]
    AmbiguousRanking(f64, f64),
    #[error("malformed input at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
