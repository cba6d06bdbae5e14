//! Robust adaptive beamforming for uniform linear arrays by reconstruction of the
//! interference-plus-noise covariance on a virtually extended array.
//!
//! The crate is `no_std` and needs only `alloc`. Angles are radians throughout.

#![no_std]
// `!(x > 0.0)` is used deliberately so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
#[macro_use]
extern crate std;

pub mod array_model;
pub mod baselines;
pub mod covariance;
pub mod error;
pub mod lcssp;
pub mod linalg;
pub mod metrics;
pub mod seeding;

pub use array_model::{ArrayGeometry, Scenario, SteeringVector};
pub use baselines::{BeamformerWeights, Method};
pub use covariance::{CovarianceEstimate, CovarianceKind};
pub use error::{Error, Result};
pub use lcssp::{LcsspConfig, ProjectionMatrix};
