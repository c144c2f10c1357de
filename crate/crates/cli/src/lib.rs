//! Scenario runner for the intensity-dependent Jaynes-Cummings simulator:
//! configuration, evaluation and serialisation behind the `idjc` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use config::{validate_config, FieldError, OutputFormat, RawConfig, Scenario, ScenarioConfig};
pub use error::CliError;
pub use scenario::{compute_scenario, run_scenario, self_check, Artifact, Metadata, RunOutput, Table};
