//! Configuration-driven scenario runner for the `eventloc` engine.

pub mod bundled;
pub mod config;
pub mod report;
pub mod runner;
pub mod selftest;

pub use config::{Pipeline, ScenarioConfig, Tolerances};
pub use report::Report;
pub use runner::{run_scenario, RunOutcome, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] eventloc::Error),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(eventloc::Error::KernelNotNormalized { .. }) => Status::CertificationFailure.exit_code(),
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}
