//! Experiment orchestration and file plumbing: accuracy metrics, grid runs
//! with deterministic parallel replication, network and sample files, SVG
//! charts and the command-line front end.

pub mod cli;
pub mod experiment;
pub mod format;
pub mod ingest;
pub mod metrics;
pub mod plot;

use thiserror::Error;

use crate::bootstrap::BootstrapError;
use crate::estimate::EstimateError;
use crate::netcore::NetworkError;
use crate::netgen::NetgenError;
use crate::rdssim::RdsError;

pub use experiment::{run_experiment, Estimator, ExperimentOutput, ExperimentSpec, ResultRow};
pub use ingest::{emit_network, emit_rds_data, ingest_network, ingest_rds_data, parse_network, parse_rds_data};
pub use metrics::{compute_metrics, compute_p_best, Metrics};
pub use plot::{emit_plots, PlotKind, PlotOptions};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{source_name}:{line}: {message}")]
    Parse { source_name: String, line: usize, message: String },
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Netgen(#[from] NetgenError),
    #[error(transparent)]
    Rds(#[from] RdsError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Bootstrap(#[from] BootstrapError),
}

impl HarnessError {
    /// 1 usage, 2 data validation, 3 runtime failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) | HarnessError::Rds(RdsError::InvalidConfig(_)) => 1,
            HarnessError::Netgen(NetgenError::InvalidParams(_)) => 1,
            HarnessError::Bootstrap(BootstrapError::InvalidConfig(_)) => 1,
            HarnessError::Parse { .. }
            | HarnessError::Data(_)
            | HarnessError::Network(_)
            | HarnessError::Estimate(_)
            | HarnessError::Rds(_)
            | HarnessError::Bootstrap(BootstrapError::Estimate(_)) => 2,
            HarnessError::Io { .. }
            | HarnessError::Runtime(_)
            | HarnessError::Netgen(_)
            | HarnessError::Bootstrap(_) => 3,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.as_ref().display().to_string(), source }
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}
