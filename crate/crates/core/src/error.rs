//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised while building, simulating or optimizing a network.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("non-positive geometry: {0}")]
    NonPositiveGeometry(String),
    #[error("disconnected graph: {0}")]
    DisconnectedGraph(String),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("singular jacobian in period {period}")]
    SingularJacobian { period: usize },
    #[error("forward solve did not converge in period {period} after {iterations} iterations (residual {residual:e})")]
    MaxIterationsExceeded {
        period: usize,
        iterations: usize,
        residual: f64,
    },
    #[error("forward solve failed in periods {0:?}")]
    PeriodFailures(Vec<usize>),
    #[error("heat pump lift must be positive, got {0} K")]
    NonPositiveLift(f64),
    #[error("capacity must be non-negative, got {0}")]
    NegativeCapacity(f64),
    #[error("pump lift must be non-negative, got {0} Pa")]
    NegativePumpLift(f64),
    #[error("solar unit is inactive")]
    InactiveUnit,
    #[error("delivered heat is zero")]
    ZeroHeat,
    #[error("time series is degenerate: {0}")]
    DegenerateSeries(String),
    #[error("too many clusters: requested {requested}, only {available} samples")]
    TooManyClusters { requested: usize, available: usize },
    #[error("line search failed")]
    LineSearchFailure,
    #[error("optimizer stalled: {0}")]
    StalledProgress(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{0}")]
    Io(String),
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
