//! Experiment harness for base station clustering.
//!
//! Runs Monte Carlo sweeps over network drops with every clustering method
//! from [`bsclust_core`], aggregates the results and reads/writes the CSV,
//! TOML and JSON files used by the `bsclust` command-line tool.

pub mod config;
mod error;
pub mod experiment;
pub mod io;
pub mod summary;

pub use config::{Budgets, ExperimentConfig, Preset, Sweep, SweepVariable};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentOutput, ResultRow, TraceLine};
pub use summary::{summarize, SummaryRow};
