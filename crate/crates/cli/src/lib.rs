//! Scenario files, runs, sweeps and exporters on top of `catsim-core`.

pub mod config;
pub mod export;
pub mod scenario;
pub mod sweep;

pub use config::{parse_scenario, Scenario};
pub use scenario::{run_scenario, RunArtifacts, RunError};
