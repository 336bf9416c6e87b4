//! Experiment harness: TOML configuration, training and evaluation
//! commands, checkpoints and CSV output.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{CliError, Result};
