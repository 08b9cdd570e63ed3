use std::num::NonZeroUsize;
use std::path::Path;

use crate::autoencoder::{train_autoencoder, Autoencoder};
use crate::baselines::{knn_fit, mlp_fit, ridge_fit, tree_fit, KnnModel, MlpModel, RidgeModel, TreeModel};
use crate::codec::{Reader, Writer};
use crate::eval::{Learner, MoleculeSet};
use crate::featurize::{ColumnStandardizer, EmbeddingMatrix, Featurizer, ScalarStandardizer};
use crate::nn::{Checkpoint, Matrix, Prng};
use crate::probcgan::{Discriminator, Divergence, Generator, PredictiveDistribution, ProbCgan};

use super::container::{write_atomic, Container};
use super::{model_learner, DataError, RunConfig};

const PREDICTION_STREAM: u64 = 0x7072_6564;

/// The activity model at the end of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    ProbCgan(ProbCgan),
    Ridge(RidgeModel),
    Knn(KnnModel),
    Tree(TreeModel),
    Mlp(MlpModel),
}

impl Predictor {
    fn key(&self) -> &'static str {
        match self {
            Predictor::ProbCgan(m) if m.generator.wiring == crate::nn::NoiseWiring::InputOnly => "cgan",
            Predictor::ProbCgan(_) => "prob_cgan",
            Predictor::Ridge(_) => "ridge",
            Predictor::Knn(_) => "knn",
            Predictor::Tree(_) => "tree",
            Predictor::Mlp(_) => "mlp",
        }
    }
}

/// Featurizer, embedding scaler, autoencoder and activity model, trained together.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline {
    pub config: RunConfig,
    pub featurizer: Featurizer,
    pub scaler: ColumnStandardizer,
    pub autoencoder: Autoencoder,
    pub predictor: Predictor,
}

impl TrainedPipeline {
    /// Fits every stage on all of `data`, seeded from `config.seed`.
    pub fn train(data: &MoleculeSet, config: &RunConfig) -> Result<Self, DataError> {
        config.validate()?;
        let p = config.pipeline().seeded(config.seed);
        let featurizer = Featurizer::fit(&data.smiles, p.fingerprint, &p.skipgram)?;
        let raw = features(&featurizer, &data.smiles)?;
        let fp = featurizer.fingerprint.length;
        let scaler = ColumnStandardizer::fit(&raw, fp, raw.ncols() - fp);
        let descriptor = scaler.apply(&raw);
        let autoencoder = train_autoencoder(&descriptor, &p.autoencoder)?;
        let x = autoencoder.encode(&descriptor)?;
        let y = &data.activities;
        let b = &p.baselines;
        let predictor = match model_learner(&config.train_model)? {
            Learner::ProbCgan => Predictor::ProbCgan(ProbCgan::fit(&x, y, &p.gan)?),
            Learner::Cgan => Predictor::ProbCgan(ProbCgan::fit(&x, y, &crate::probcgan::GanConfig::cgan_from(&p.gan))?),
            Learner::Ridge => Predictor::Ridge(ridge_fit(&x, y, b.ridge_lambda)?),
            Learner::Knn => Predictor::Knn(knn_fit(&x, y, b.knn_k.min(y.len()))?),
            Learner::Tree => Predictor::Tree(tree_fit(&x, y, b.tree_max_depth, b.tree_min_leaf)?),
            Learner::Mlp => Predictor::Mlp(mlp_fit(&x, y, &p.mlp)?),
            Learner::Mean | Learner::Oracle => {
                return Err(DataError::Config("train_model must be a learned model".into()))
            }
        };
        Ok(Self {
            config: config.clone(),
            featurizer,
            scaler,
            autoencoder,
            predictor,
        })
    }

    /// Autoencoder codes of `smiles`.
    pub fn latent(&self, smiles: &[String]) -> Result<Matrix, DataError> {
        let raw = features(&self.featurizer, smiles)?;
        Ok(self.autoencoder.encode(&self.scaler.apply(&raw))?)
    }

    /// One distribution per molecule. Point models give a single sample.
    pub fn predict(&self, smiles: &[String]) -> Result<Vec<PredictiveDistribution>, DataError> {
        let x = self.latent(smiles)?;
        let rows = || x.rows().into_iter().map(|r| r.to_vec());
        let point = |v: Vec<f64>| {
            v.into_iter()
                .map(|p| PredictiveDistribution::new(vec![p]).expect("one sample"))
                .collect()
        };
        Ok(match &self.predictor {
            Predictor::ProbCgan(m) => {
                let k = NonZeroUsize::new(self.config.gan.samples).expect("validated");
                let mut prng = Prng::new(self.config.seed).split(PREDICTION_STREAM);
                m.predict_batch(&x, k, &mut prng)?
            }
            Predictor::Ridge(m) => point(rows().map(|r| m.predict(&r)).collect()),
            Predictor::Knn(m) => point(rows().map(|r| m.predict(&r)).collect()),
            Predictor::Tree(m) => point(rows().map(|r| m.predict(&r)).collect()),
            Predictor::Mlp(m) => point(m.predict_rows(&x)?),
        })
    }

    pub fn to_container(&self) -> Container {
        let mut c = Container::new();
        c.push("config", self.config.to_toml().into_bytes());
        let mut fp = Writer::new();
        fp.u32(self.featurizer.fingerprint.length as u32)
            .u32(self.featurizer.fingerprint.radius);
        c.push("fingerprint", fp.into_bytes());
        c.push("embedding", self.featurizer.embedding.to_bytes());
        let mut w = Writer::new();
        self.scaler.write(&mut w);
        c.push("scaler", w.into_bytes());
        c.push("autoencoder", self.autoencoder.to_checkpoint().to_bytes());
        c.push("model_kind", self.predictor.key().as_bytes().to_vec());
        let target = |t: &ScalarStandardizer| {
            let mut w = Writer::new();
            w.f64(t.mean).f64(t.std);
            w.into_bytes()
        };
        match &self.predictor {
            Predictor::ProbCgan(m) => {
                c.push("target", target(&m.target));
                c.push("generator", m.generator.to_checkpoint(m.divergence).to_bytes());
                c.push("discriminator", m.discriminator.to_checkpoint(m.divergence).to_bytes());
            }
            Predictor::Mlp(m) => {
                c.push("target", target(&m.target));
                c.push("mlp", m.to_checkpoint().to_bytes());
            }
            Predictor::Ridge(m) => c.push("ridge", encoded(|w| m.write(w))),
            Predictor::Knn(m) => c.push("knn", encoded(|w| m.write(w))),
            Predictor::Tree(m) => c.push("tree", encoded(|w| m.write(w))),
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Self, DataError> {
        let corrupt = |what: &str| DataError::CorruptFile(what.to_owned());
        let config_text = std::str::from_utf8(c.get("config")?).map_err(|_| corrupt("config is not UTF-8"))?;
        let config = RunConfig::from_toml(config_text)?;
        let mut r = Reader::new(c.get("fingerprint")?);
        let fingerprint = crate::featurize::FingerprintConfig {
            length: r.u32().map_err(|_| corrupt("fingerprint section"))? as usize,
            radius: r.u32().map_err(|_| corrupt("fingerprint section"))?,
        };
        let embedding = EmbeddingMatrix::from_bytes(c.get("embedding")?).map_err(|e| corrupt(&e.to_string()))?;
        let scaler = ColumnStandardizer::read(&mut Reader::new(c.get("scaler")?)).map_err(|_| corrupt("scaler section"))?;
        let autoencoder = Autoencoder::from_checkpoint(&checkpoint(c, "autoencoder")?)
            .map_err(|e| corrupt(&e.to_string()))?;
        let target = || -> Result<ScalarStandardizer, DataError> {
            let mut r = Reader::new(c.get("target")?);
            let mean = r.f64().map_err(|_| corrupt("target section"))?;
            let std = r.f64().map_err(|_| corrupt("target section"))?;
            Ok(ScalarStandardizer { mean, std })
        };
        let kind = std::str::from_utf8(c.get("model_kind")?).map_err(|_| corrupt("model kind"))?;
        let predictor = match kind {
            "prob_cgan" | "cgan" => {
                let g = Generator::from_checkpoint(&checkpoint(c, "generator")?)
                    .map_err(|e| corrupt(&e.to_string()))?;
                let dc = checkpoint(c, "discriminator")?;
                let divergence = Divergence::from_tag(dc.divergence).ok_or_else(|| corrupt("divergence tag"))?;
                let d = Discriminator::from_checkpoint(&dc).map_err(|e| corrupt(&e.to_string()))?;
                Predictor::ProbCgan(ProbCgan {
                    generator: g,
                    discriminator: d,
                    divergence,
                    target: target()?,
                    history: Vec::new(),
                })
            }
            "mlp" => Predictor::Mlp(
                MlpModel::from_checkpoint(&checkpoint(c, "mlp")?, target()?).map_err(|e| corrupt(&e.to_string()))?,
            ),
            "ridge" => Predictor::Ridge(decode(c, "ridge", RidgeModel::read)?),
            "knn" => Predictor::Knn(decode(c, "knn", KnnModel::read)?),
            "tree" => Predictor::Tree(decode(c, "tree", TreeModel::read)?.ok_or_else(|| corrupt("tree structure"))?),
            other => return Err(corrupt(&format!("unknown model kind `{other}`"))),
        };
        Ok(Self {
            config,
            featurizer: Featurizer {
                fingerprint,
                embedding,
            },
            scaler,
            autoencoder,
            predictor,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), DataError> {
        write_atomic(path, &self.to_container().to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self, DataError> {
        let bytes = std::fs::read(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => DataError::FileNotFound(path.to_owned()),
            _ => DataError::Io {
                path: path.to_owned(),
                source: e,
            },
        })?;
        Self::from_container(&Container::from_bytes(&bytes)?)
    }
}

fn encoded(f: impl FnOnce(&mut Writer)) -> Vec<u8> {
    let mut w = Writer::new();
    f(&mut w);
    w.into_bytes()
}

fn decode<T, E>(c: &Container, name: &str, read: impl FnOnce(&mut Reader<'_>) -> Result<T, E>) -> Result<T, DataError> {
    let mut r = Reader::new(c.get(name)?);
    let v = read(&mut r).map_err(|_| DataError::CorruptFile(format!("section `{name}`")))?;
    if r.remaining() != 0 {
        return Err(DataError::CorruptFile(format!("trailing bytes in section `{name}`")));
    }
    Ok(v)
}

fn checkpoint(c: &Container, name: &str) -> Result<Checkpoint, DataError> {
    Checkpoint::from_bytes(c.get(name)?).map_err(|e| DataError::CorruptFile(format!("section `{name}`: {e}")))
}

/// Raw descriptor rows for `smiles`.
pub fn features(featurizer: &Featurizer, smiles: &[String]) -> Result<Matrix, DataError> {
    let dim = featurizer.feature_dim();
    let mut values = Vec::with_capacity(smiles.len() * dim);
    for s in smiles {
        values.extend(featurizer.features(s)?.into_values());
    }
    Ok(Matrix::from_shape_vec((smiles.len(), dim), values).expect("rows × feature_dim"))
}
