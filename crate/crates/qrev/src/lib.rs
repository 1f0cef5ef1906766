//! Configuration, file formats and experiment drivers around `qrev-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod fieldfile;
pub mod table;

pub use config::{ExperimentConfig, LoadedConfig};
pub use error::CliError;
pub use experiment::RunOptions;
