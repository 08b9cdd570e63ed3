use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autoencoder::AutoencoderConfig;
use crate::baselines::{BaselineConfig, MlpConfig};
use crate::eval::{Conditioning, Learner, ModelSpec, PipelineConfig};
use crate::featurize::{FingerprintConfig, SkipGramConfig};
use crate::probcgan::GanConfig;

use super::{ColumnMap, DataError};

/// Everything a command-line run needs, stored as TOML. Unknown keys are
/// rejected; omitted keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for single-run commands (`train`, `synth-check`).
    pub seed: u64,
    /// Seeds averaged by `benchmark` and `ablate`.
    pub seeds: Vec<u64>,
    /// Models reported by `benchmark`: prob_cgan, cgan, ridge, knn, tree, mlp, mean.
    pub models: Vec<String>,
    /// Model stored by `train`.
    pub train_model: String,
    pub synthetic_samples: usize,
    pub data: DataConfig,
    pub fingerprint: FingerprintConfig,
    pub skipgram: SkipGramConfig,
    pub autoencoder: AutoencoderConfig,
    pub gan: GanConfig,
    pub baselines: BaselineConfig,
    pub mlp: MlpConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub path: Option<PathBuf>,
    pub columns: ColumnMap,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            seeds: vec![1, 2, 3, 4, 5],
            models: ["prob_cgan", "ridge", "knn", "tree", "mlp"].map(String::from).to_vec(),
            train_model: "prob_cgan".into(),
            synthetic_samples: 2000,
            data: DataConfig::default(),
            fingerprint: FingerprintConfig::default(),
            skipgram: SkipGramConfig::default(),
            autoencoder: AutoencoderConfig::default(),
            gan: GanConfig::default(),
            baselines: BaselineConfig::default(),
            mlp: MlpConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, DataError> {
        let c: Self = toml::from_str(text).map_err(|e| DataError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => DataError::FileNotFound(path.to_owned()),
            _ => DataError::Io {
                path: path.to_owned(),
                source: e,
            },
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.seeds.is_empty() {
            return Err(DataError::Config("seeds must not be empty".into()));
        }
        self.benchmark_models()?;
        model_learner(&self.train_model)?;
        self.fingerprint
            .validate()
            .map_err(|e| DataError::Config(e.to_string()))?;
        self.gan.validate().map_err(|e| DataError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            fingerprint: self.fingerprint,
            skipgram: self.skipgram,
            autoencoder: self.autoencoder,
            gan: self.gan.clone(),
            baselines: self.baselines,
            mlp: self.mlp.clone(),
        }
    }

    /// FNV-1a over the canonical TOML rendering.
    pub fn fingerprint(&self) -> u64 {
        crate::featurize::fnv1a64(self.to_toml().as_bytes())
    }

    /// Generative models on the latent code; every baseline on both the
    /// latent code and the raw descriptor.
    pub fn benchmark_models(&self) -> Result<Vec<ModelSpec>, DataError> {
        let mut out = Vec::new();
        for key in &self.models {
            let learner = model_learner(key)?;
            let base = match learner {
                Learner::ProbCgan => "Prob-cGAN",
                Learner::Cgan => "cGAN",
                Learner::Ridge => "Ridge",
                Learner::Knn => "K-Neighbours",
                Learner::Tree => "Decision Tree",
                Learner::Mlp => "MLP",
                Learner::Mean => "Mean",
                Learner::Oracle => unreachable!("not selectable"),
            };
            match learner {
                Learner::ProbCgan | Learner::Cgan | Learner::Mean => {
                    out.push(ModelSpec::new(base, learner, Conditioning::Latent))
                }
                _ => {
                    out.push(ModelSpec::new(&format!("{base} (latent)"), learner, Conditioning::Latent));
                    out.push(ModelSpec::new(
                        &format!("{base} (descriptor)"),
                        learner,
                        Conditioning::Descriptor,
                    ));
                }
            }
        }
        if out.is_empty() {
            return Err(DataError::Config("no models selected".into()));
        }
        Ok(out)
    }
}

pub fn model_learner(key: &str) -> Result<Learner, DataError> {
    Ok(match key {
        "prob_cgan" => Learner::ProbCgan,
        "cgan" => Learner::Cgan,
        "ridge" => Learner::Ridge,
        "knn" => Learner::Knn,
        "tree" => Learner::Tree,
        "mlp" => Learner::Mlp,
        "mean" => Learner::Mean,
        other => return Err(DataError::Config(format!("unknown model `{other}`"))),
    })
}
