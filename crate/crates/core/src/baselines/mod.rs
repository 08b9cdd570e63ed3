//! Reference regressors: ridge, k-nearest neighbours, a regression tree and a small MLP.

mod knn;
mod mlp;
mod ridge;
mod tree;

pub use knn::{knn_fit, KnnModel};
pub use mlp::{mlp_fit, MlpConfig, MlpModel};
pub use ridge::{ridge_fit, RidgeModel};
pub use tree::{best_split, tree_fit, SplitChoice, TreeModel, TreeNode};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BaselineError {
    #[error("normal equations are singular (rank-deficient design with lambda = 0)")]
    SingularSystem,
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Defaults for the non-network baselines.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub ridge_lambda: f64,
    pub knn_k: usize,
    pub tree_max_depth: usize,
    pub tree_min_leaf: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            ridge_lambda: 1.0,
            knn_k: 5,
            tree_max_depth: 12,
            tree_min_leaf: 3,
        }
    }
}
