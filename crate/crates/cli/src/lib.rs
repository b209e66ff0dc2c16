//! Experiment runner for max-trace tuning: dataset loaders, TOML manifests,
//! the synthetic recipes and JSON reports.

pub mod config;
pub mod io;
pub mod recipes;
pub mod report;
pub mod run;

use std::path::{Path, PathBuf};

pub use config::{DeltaMode, ExperimentConfig, ExperimentKind, GeneratorKind};
pub use io::{load_edge_list, load_labels, load_points_csv};
pub use report::{Aggregate, RunReport, SeedRun};
pub use run::{run_experiment, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("report: {0}")]
    Report(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] matr_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Self::Parse { line, msg: msg.into() }
    }
}
