//! Configuration, experiment presets, and CSV output for the SCF C-RAN
//! simulator. The library side of the `scf` binary, kept separate so tests
//! can drive whole experiments in-process.

pub mod config;
pub mod runner;

pub use config::{
    parse_config, serialize_config, ConfigError, ExperimentSpec, ParsedConfig, Preset,
};
pub use runner::{run_experiment, write_csv, CsvRow};

use std::fmt;

/// Top-level error of the command-line pipeline.
#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(scf_core::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Core(e) => write!(f, "solver error: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<scf_core::Error> for CliError {
    fn from(e: scf_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
