//! Metrics, splits and experiment drivers.

mod metrics;
mod pipeline;
mod report;
mod split;
mod synth_check;
mod synthetic;

pub use metrics::{average_ranks, pearson, r2, rmse, spearman, MetricError};
pub use pipeline::{
    run_ablation, run_benchmark, run_seed, BenchmarkOutcome, Conditioning, CorruptedSynthetic,
    DescriptorSource, FitGuard, Learner, ModelRun, ModelSpec, MoleculeSet, PipelineConfig, SeedRun,
    CORRUPTION_NOISE,
};
pub use report::{curves_to_csv, EvalReport, PredictionCurve, ReportRow, Summary};
pub use split::{split, Split, SplitSpec, MIN_SPLIT_SAMPLES, TRAIN_FRACTION};
pub use synth_check::{
    run_synthetic_check, SyntheticCheck, MAX_BAYES_RATIO, MIN_SPREAD_SPEARMAN, SPREAD_PROBE_SAMPLES,
};
pub use synthetic::{SyntheticTask, MIN_SYNTHETIC_SAMPLES, NOISE_SPREAD, SIGNAL_SPREAD, SYNTHETIC_DIM};

use crate::baselines::BaselineError;
use crate::featurize::FeatureError;
use crate::nn::NnError;
use crate::TrainError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("test index {index} reached a fit call")]
    Leakage { index: usize },
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Nn(#[from] NnError),
}
