//! Experiment configuration, manifests and the commands behind the `qpac`
//! binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

mod config;
mod experiments;
mod manifest;
mod validate;

pub use config::{
    ClassSource, ClassicalProblem, ConcentrationConfig, EnvironmentSource, ExperimentConfig, LabelSet, ModeKind,
    ObservableConfig, Scenario, SourceConfig,
};
pub use experiments::{
    binomial_margin, compare, concentration, embed_classical, partition_report, run_sweep, sample_demand, CompareRow,
    ConcentrationRow, EmbedReport, EmbedRisk, GridSummary, PartitionReport, StrategyObjective, Sweep, TrialRow,
};
pub use manifest::{ClassManifest, EnvironmentManifest, LossConfig, PartitionExport, PredictorManifest};
pub use validate::{validate_document, Check, ValidationReport};

use crate::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Usage(_) | HarnessError::Io { .. } => EXIT_USAGE,
            HarnessError::Core(Error::InfeasibleBudget { .. })
            | HarnessError::Core(Error::InsufficientSamples { .. })
            | HarnessError::Core(Error::ExactLimit { .. }) => EXIT_INFEASIBLE,
            _ => EXIT_VALIDATION,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// CSV with a header row. `Option` fields become empty cells.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| HarnessError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
