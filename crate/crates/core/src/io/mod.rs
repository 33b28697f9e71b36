//! Configuration files, CSV tables and the command runner.

pub mod config;
pub mod runner;
pub mod table;

pub use config::{parse_config, parse_config_str, Config, ConfigError};
pub use runner::{
    run_command, Command, RunError, RunManifest, RunReport, SweepOverrides, EXIT_CONFIG,
    EXIT_NUMERICAL, EXIT_OK,
};
pub use table::{format_float, TableError};
