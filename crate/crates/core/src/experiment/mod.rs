//! Config-driven experiments: configuration, the imaging pipeline, metrics,
//! runs, sweeps and the bundled presets.

use std::path::PathBuf;

use thiserror::Error;

use crate::error::ImagingError;

pub mod config;
pub mod metrics;
pub mod pipeline;
pub mod presets;
pub mod run;

pub use config::{ConfigError, ConfigErrors, ExperimentConfig};

/// Process exit codes, one per error class.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigErrors),

    #[error("{0}")]
    Imaging(#[from] ImagingError),

    #[error("i/o error on {}: {message}", path.display())]
    Io { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => EXIT_CONFIG,
            ExperimentError::Io { .. } | ExperimentError::Imaging(ImagingError::Io(_)) => EXIT_IO,
            ExperimentError::Imaging(_) => EXIT_NUMERICAL,
            ExperimentError::Usage(_) => EXIT_USAGE,
        }
    }
}
