//! Configuration, file formats and run modes behind the `kerrwalk` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use commands::{profile_rows, run_profile, run_sweep_cmd, run_walk, WalkSummary};
pub use config::{Format, Mode, ParamText, RangeText, RunConfig, SweepConfig, WalkConfig};
pub use error::{CliError, Result};
