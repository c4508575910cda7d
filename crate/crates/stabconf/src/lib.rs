//! Dataset IO, experiment configs, the parallel experiment driver and the
//! `stabconf` command line on top of `stabconf-core`.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod format;
pub mod runner;

pub use error::{CliError, CliResult, ErrorKind};
