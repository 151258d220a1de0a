//! Experiment runner for `unibandit`: TOML configs in, per-replica CSV
//! traces and summaries plus a hashed manifest out.

pub mod config;
pub mod demos;
pub mod error;
pub mod runner;
pub mod summarize;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use runner::{output_dir, run_experiment, RunOptions};
pub use summarize::summarize;
