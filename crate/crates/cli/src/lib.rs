//! Experiment harness for `dsfusion`: train the evidence combiners, fit the
//! baselines, evaluate every combiner over classifier subsets and check the
//! metric arithmetic against published numbers.

pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod report;
pub mod subsets;

pub use config::{Combiner, ExperimentConfig, SubsetPolicy};
pub use error::{CliError, Result};
