//! Dataset ingestion, run configuration and model bundles.

mod bundle;
mod chembl;
mod config;
mod container;

use std::path::PathBuf;

pub use bundle::{features, Predictor, TrainedPipeline};
pub use chembl::{load_chembl_csv, ActivityRecord, ColumnMap, Dataset, Provenance, SkipCounts, ACTIVITY_RANGE};
pub use config::{model_learner, DataConfig, RunConfig};
pub use container::{write_atomic, Container, BUNDLE_MAGIC, BUNDLE_VERSION};

use crate::baselines::BaselineError;
use crate::eval::EvalError;
use crate::featurize::FeatureError;
use crate::nn::NnError;
use crate::TrainError;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("malformed delimited file: {0}")]
    Csv(String),
    #[error("{}: no usable rows ({skipped} skipped)", path.display())]
    NoValidRows { path: PathBuf, skipped: usize },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("bundle format version {found} is not supported (this build reads version {expected})")]
    VersionMismatch { found: u16, expected: u16 },
    #[error("corrupt bundle: {0}")]
    CorruptFile(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
