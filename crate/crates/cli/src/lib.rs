//! Configuration, experiment drivers and CSV output for the `hyperavg` CLI.

pub mod config;
pub mod harness;
pub mod output;

pub use config::{InitialData, RunConfig, TEnd};
pub use harness::{Comparison, ConvergenceRow, ErrorReport, Harness};
