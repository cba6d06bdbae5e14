//! Experiment harness for the beamforming core: JSON configuration, parallel Monte
//! Carlo sweeps, CSV/JSON emission and a plotting script.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod harness;
pub mod output;
pub mod plot;

pub use config::{Experiment, ExperimentConfig, LSetting};
pub use error::{HarnessError, Result};
pub use harness::{run_experiment, SweepResult};
