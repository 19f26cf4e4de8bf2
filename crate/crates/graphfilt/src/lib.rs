//! Experiment harness for `graphfilt-core`.
//!
//! Configs describe a graph, a filter model, a signal source and an
//! adaptive algorithm; [`experiment::Experiment`] realizes them for a master
//! seed, [`monte_carlo`] averages independent runs in parallel, and [`io`]
//! reads and writes the CSV and edge-list formats. [`dataset`] covers the
//! temperature reconstruction task and [`presets`] the published setups.

pub mod config;
pub mod dataset;
pub mod experiment;
pub mod io;
pub mod monte_carlo;
pub mod presets;
pub mod tuning;

use std::path::PathBuf;

pub use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Core(#[from] graphfilt_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },
    #[error("numeric divergence: {0}")]
    Divergence(String),
}

impl HarnessError {
    /// Process exit code for the command line.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::UnknownPreset(_) | HarnessError::Format { .. } => 2,
            HarnessError::Divergence(_) | HarnessError::Core(graphfilt_core::Error::Unstable { .. }) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
