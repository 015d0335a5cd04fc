//! Config-driven experiments for the coupled NLS solver: CSV time series,
//! binary checkpoints and JSON verdicts.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod experiments;
pub mod output;
pub mod verdict;

pub use config::{parse_config, ExperimentConfig, Kind};
pub use error::{HarnessError, Result};
pub use experiments::{resume_experiment, run_experiment, Outcome};
pub use verdict::{Status, Verdict};
