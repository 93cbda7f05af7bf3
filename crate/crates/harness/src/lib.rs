//! Data loading, configuration, experiments and reporting for the
//! multiplicity robustness certifier.

pub mod data;
pub mod error;
pub mod experiment;
pub mod report;
pub mod spec_config;
pub mod synthetic;
pub mod verify;

pub use error::{HarnessError, Result};
