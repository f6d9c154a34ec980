//! Experiment drivers, file formats and the acceptance suite for
//! [`trunc_ivp_core`].
//!
//! Configurations are JSON documents ([`config::ExperimentConfig`]); every
//! report is CSV with floats in shortest round-trip form. Runs are
//! deterministic: the worker pool only changes wall time.

// `!(x <= y)` deliberately counts NaN as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod runs;
pub mod witness;

pub use config::{Command, ExperimentConfig};
pub use error::{HarnessError, Result};
