use thiserror::Error;

/// Errors produced by the beamforming core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element count must be at least one")]
    ZeroElements,
    #[error("angle {0} rad lies outside the open interval (-pi/2, pi/2)")]
    AngleOutOfRange(f64),
    #[error("invalid array geometry: {0}")]
    InvalidGeometry(&'static str),
    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("extended dimension {extended} is smaller than the physical element count {physical}")]
    DimensionTooSmall { extended: usize, physical: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("signal sector swallows every basis angle at dimension {0}")]
    EmptyProjection(usize),
    #[error(
        "normalized error never reached {delta} for dimensions up to {l_max} \
         (best {best_error} at L = {best_l})"
    )]
    NoConvergence {
        delta: f64,
        l_max: usize,
        best_l: usize,
        best_error: f64,
    },
    #[error("covariance matrix is singular (condition number {0:e})")]
    SingularCovariance(f64),
    #[error("output power of the weight vector is zero")]
    ZeroOutputPower,
}

pub type Result<T> = core::result::Result<T, Error>;
