use std::cell::Cell;
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

use crate::autoencoder::{train_autoencoder, AutoencoderConfig};
use crate::baselines::{knn_fit, mlp_fit, ridge_fit, tree_fit, BaselineConfig, MlpConfig};
use crate::featurize::{
    fnv1a64, ColumnStandardizer, Featurizer, FingerprintConfig, SkipGramConfig, FINGERPRINT_BITS,
};
use crate::nn::{select_rows, Matrix, Prng};
use crate::probcgan::{GanConfig, ProbCgan};

use super::report::{EvalReport, PredictionCurve, ReportRow};
use super::split::{split, SplitSpec};
use super::synthetic::SyntheticTask;
use super::{r2, rmse, EvalError};

/// Hyperparameters of every stage. Per-stage `seed` fields are replaced by
/// the run seed inside the experiment drivers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub fingerprint: FingerprintConfig,
    pub skipgram: SkipGramConfig,
    pub autoencoder: AutoencoderConfig,
    pub gan: GanConfig,
    pub baselines: BaselineConfig,
    pub mlp: MlpConfig,
}

impl PipelineConfig {
    /// FNV-1a over the canonical TOML rendering.
    pub fn fingerprint(&self) -> u64 {
        fnv1a64(toml::to_string(self).expect("config serializes").as_bytes())
    }

    /// Copy with every stage seeded from `seed`.
    pub fn seeded(&self, seed: u64) -> Self {
        let mut c = self.clone();
        c.skipgram.seed = seed;
        c.autoencoder.seed = seed;
        c.gan.seed = seed;
        c.mlp.seed = seed;
        c
    }
}

/// Rejects any fit request that would touch a test index.
#[derive(Debug)]
pub struct FitGuard {
    is_test: Vec<bool>,
    checks: Cell<usize>,
}

impl FitGuard {
    pub fn new(n: usize, test: &[usize]) -> Self {
        let mut is_test = vec![false; n];
        for &i in test {
            is_test[i] = true;
        }
        Self {
            is_test,
            checks: Cell::new(0),
        }
    }

    pub fn check(&self, indices: &[usize]) -> Result<(), EvalError> {
        self.checks.set(self.checks.get() + 1);
        match indices.iter().find(|&&i| self.is_test[i]) {
            Some(&index) => Err(EvalError::Leakage { index }),
            None => Ok(()),
        }
    }

    /// Number of fit inputs that passed through the guard.
    pub fn checks(&self) -> usize {
        self.checks.get()
    }

    pub fn rows(&self, m: &Matrix, indices: &[usize]) -> Result<Matrix, EvalError> {
        self.check(indices)?;
        Ok(select_rows(m, indices))
    }

    pub fn items<T: Clone>(&self, v: &[T], indices: &[usize]) -> Result<Vec<T>, EvalError> {
        self.check(indices)?;
        Ok(indices.iter().map(|&i| v[i].clone()).collect())
    }
}

/// A labelled dataset that can produce fused descriptors (fingerprint block
/// first, then embedding-like block) with anything learned fitted on the
/// training rows only.
pub trait DescriptorSource {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn targets(&self) -> &[f64];
    /// Width of the leading fingerprint block.
    fn fingerprint_len(&self) -> usize;
    /// Descriptor rows for every sample.
    fn descriptors(
        &self,
        guard: &FitGuard,
        train: &[usize],
        config: &PipelineConfig,
    ) -> Result<Matrix, EvalError>;
    /// Content hash identifying the dataset in reports.
    fn content_hash(&self) -> u64;
}

fn hash_values(h: &mut Vec<u8>, values: impl IntoIterator<Item = f64>) {
    for v in values {
        h.extend_from_slice(&v.to_le_bytes());
    }
}

/// Molecules given as SMILES with activities; descriptors are fingerprint
/// bits plus a token embedding trained on the training SMILES.
#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeSet {
    pub smiles: Vec<String>,
    pub activities: Vec<f64>,
}

impl DescriptorSource for MoleculeSet {
    fn len(&self) -> usize {
        self.smiles.len()
    }

    fn targets(&self) -> &[f64] {
        &self.activities
    }

    fn fingerprint_len(&self) -> usize {
        FINGERPRINT_BITS
    }

    fn descriptors(
        &self,
        guard: &FitGuard,
        train: &[usize],
        config: &PipelineConfig,
    ) -> Result<Matrix, EvalError> {
        let corpus = guard.items(&self.smiles, train)?;
        let featurizer = Featurizer::fit(&corpus, config.fingerprint, &config.skipgram)?;
        let dim = featurizer.feature_dim();
        let mut values = Vec::with_capacity(self.len() * dim);
        for s in &self.smiles {
            values.extend(featurizer.features(s)?.into_values());
        }
        Ok(Matrix::from_shape_vec((self.len(), dim), values).expect("rows × feature_dim"))
    }

    fn content_hash(&self) -> u64 {
        let mut bytes = Vec::new();
        for (s, a) in self.smiles.iter().zip(&self.activities) {
            bytes.extend_from_slice(s.as_bytes());
            bytes.push(0);
            hash_values(&mut bytes, [*a]);
        }
        fnv1a64(&bytes)
    }
}

/// The synthetic task seen through an 812-column descriptor with the same
/// block structure as the molecular one. The 512-column "fingerprint" block is
/// a noisy random projection of only the first half of the inputs; the
/// 300-column "embedding" block is a noisy projection of all of them. So the
/// fingerprint block alone cannot recover the target, and the full
/// descriptor is redundant and noisy.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptedSynthetic {
    pub task: SyntheticTask,
    pub lifted: Matrix,
}

pub const CORRUPTION_NOISE: f64 = 0.1;

impl CorruptedSynthetic {
    pub fn new(task: SyntheticTask, seed: u64) -> Self {
        Self::with_noise(task, seed, CORRUPTION_NOISE)
    }

    /// As [`new`](Self::new) with per-column noise of standard deviation `noise`.
    pub fn with_noise(task: SyntheticTask, seed: u64, noise: f64) -> Self {
        let d = task.x.ncols();
        let half = d / 2;
        let mut prng = Prng::new(seed).split(0xC0);
        let fp = Matrix::from_shape_simple_fn((half, FINGERPRINT_BITS), || {
            prng.normal() / (half as f64).sqrt()
        });
        let emb = Matrix::from_shape_simple_fn((d, 300), || prng.normal() / (d as f64).sqrt());
        let a = task.x.slice(ndarray::s![.., ..half]).dot(&fp);
        let b = task.x.dot(&emb);
        let mut lifted = ndarray::concatenate(ndarray::Axis(1), &[a.view(), b.view()]).expect("same rows");
        lifted.mapv_inplace(|v| v + noise * prng.normal());
        Self { task, lifted }
    }
}

impl DescriptorSource for CorruptedSynthetic {
    fn len(&self) -> usize {
        self.task.len()
    }

    fn targets(&self) -> &[f64] {
        &self.task.y
    }

    fn fingerprint_len(&self) -> usize {
        FINGERPRINT_BITS
    }

    fn descriptors(&self, _: &FitGuard, _: &[usize], _: &PipelineConfig) -> Result<Matrix, EvalError> {
        Ok(self.lifted.clone())
    }

    fn content_hash(&self) -> u64 {
        let mut bytes = Vec::new();
        hash_values(&mut bytes, self.lifted.iter().copied());
        hash_values(&mut bytes, self.task.y.iter().copied());
        fnv1a64(&bytes)
    }
}

/// Which representation a model is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    /// Autoencoder code.
    Latent,
    /// Full fused descriptor, no autoencoder.
    Descriptor,
    /// Fingerprint block only, no autoencoder.
    Fingerprint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Learner {
    ProbCgan,
    /// Input-only noise with the JS objective.
    Cgan,
    Ridge,
    Knn,
    Tree,
    Mlp,
    /// Training-set mean.
    Mean,
    /// Returns the test truth; harness check only.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub name: String,
    pub learner: Learner,
    pub input: Conditioning,
}

impl ModelSpec {
    pub fn new(name: &str, learner: Learner, input: Conditioning) -> Self {
        Self {
            name: name.to_owned(),
            learner,
            input,
        }
    }

    /// The four ablation rows.
    pub fn ablation_set() -> Vec<ModelSpec> {
        vec![
            ModelSpec::new("Prob-cGAN", Learner::ProbCgan, Conditioning::Latent),
            ModelSpec::new("cGAN", Learner::Cgan, Conditioning::Latent),
            ModelSpec::new("(w/o) Autoencoder", Learner::ProbCgan, Conditioning::Descriptor),
            ModelSpec::new(
                "(w/o) Autoencoder, Word Embedding",
                Learner::ProbCgan,
                Conditioning::Fingerprint,
            ),
        ]
    }
}

/// Test-set predictions of one model under one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRun {
    pub model: String,
    pub input_width: usize,
    pub test: Vec<usize>,
    pub prediction: Vec<f64>,
    /// Predictive spread, for generative models.
    pub spread: Option<Vec<f64>>,
    pub r2: f64,
    pub rmse: f64,
}

/// Everything learned and predicted under one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRun {
    pub seed: u64,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub runs: Vec<ModelRun>,
    /// Fit inputs vetted by the leakage guard.
    pub guarded_fits: usize,
}

const PREDICTION_STREAM: u64 = 0x7072_6564;

fn fit_predict(
    spec: &ModelSpec,
    x: &Matrix,
    y: &[f64],
    train: &[usize],
    test: &[usize],
    guard: &FitGuard,
    config: &PipelineConfig,
) -> Result<(Vec<f64>, Option<Vec<f64>>), EvalError> {
    let xt = guard.rows(x, train)?;
    let yt = guard.items(y, train)?;
    let xs = select_rows(x, test);
    let rows = || xs.rows().into_iter().map(|r| r.to_vec());
    let b = &config.baselines;
    let point = |p: Vec<f64>| Ok((p, None));
    match spec.learner {
        Learner::ProbCgan | Learner::Cgan => {
            let gan = match spec.learner {
                Learner::Cgan => GanConfig::cgan_from(&config.gan),
                _ => config.gan.clone(),
            };
            let model = ProbCgan::fit(&xt, &yt, &gan)?;
            let k = NonZeroUsize::new(gan.samples).expect("validated");
            let mut prng = Prng::new(gan.seed).split(PREDICTION_STREAM);
            let dists = model.predict_batch(&xs, k, &mut prng)?;
            let mean = dists.iter().map(|d| d.mean()).collect();
            let std = dists.iter().map(|d| d.std()).collect();
            Ok((mean, Some(std)))
        }
        Learner::Ridge => {
            let m = ridge_fit(&xt, &yt, b.ridge_lambda)?;
            point(rows().map(|r| m.predict(&r)).collect())
        }
        Learner::Knn => {
            let m = knn_fit(&xt, &yt, b.knn_k.min(yt.len()))?;
            point(rows().map(|r| m.predict(&r)).collect())
        }
        Learner::Tree => {
            let m = tree_fit(&xt, &yt, b.tree_max_depth, b.tree_min_leaf)?;
            point(rows().map(|r| m.predict(&r)).collect())
        }
        Learner::Mlp => point(mlp_fit(&xt, &yt, &config.mlp)?.predict_rows(&xs)?),
        Learner::Mean => {
            let m = yt.iter().sum::<f64>() / yt.len() as f64;
            point(vec![m; test.len()])
        }
        Learner::Oracle => point(test.iter().map(|&i| y[i]).collect()),
    }
}

/// Split, fit descriptors/standardizer/autoencoder on the training rows, then
/// train and score every model on the held-out rows.
pub fn run_seed(
    source: &dyn DescriptorSource,
    models: &[ModelSpec],
    config: &PipelineConfig,
    seed: u64,
) -> Result<SeedRun, EvalError> {
    let config = config.seeded(seed);
    let sp = split(source.len(), &SplitSpec::new(seed))?;
    let guard = FitGuard::new(source.len(), &sp.test);
    let y = source.targets();

    let raw = source.descriptors(&guard, &sp.train, &config)?;
    let fp_len = source.fingerprint_len();
    let scaler = ColumnStandardizer::fit(&guard.rows(&raw, &sp.train)?, fp_len, raw.ncols() - fp_len);
    let descriptor = scaler.apply(&raw);

    let latent = if models.iter().any(|m| m.input == Conditioning::Latent) {
        let ae = train_autoencoder(&guard.rows(&descriptor, &sp.train)?, &config.autoencoder)?;
        Some(ae.encode(&descriptor)?)
    } else {
        None
    };
    let fingerprint = descriptor.slice(ndarray::s![.., ..fp_len]).to_owned();

    let mut runs = Vec::with_capacity(models.len());
    for spec in models {
        let x = match spec.input {
            Conditioning::Latent => latent.as_ref().expect("trained when requested"),
            Conditioning::Descriptor => &descriptor,
            Conditioning::Fingerprint => &fingerprint,
        };
        log::info!("seed {seed}: fitting {} on {} columns", spec.name, x.ncols());
        let (prediction, spread) = fit_predict(spec, x, y, &sp.train, &sp.test, &guard, &config)?;
        let truth: Vec<f64> = sp.test.iter().map(|&i| y[i]).collect();
        runs.push(ModelRun {
            model: spec.name.clone(),
            input_width: x.ncols(),
            test: sp.test.clone(),
            r2: r2(&prediction, &truth)?,
            rmse: rmse(&prediction, &truth)?,
            prediction,
            spread,
        });
    }
    Ok(SeedRun {
        seed,
        train: sp.train,
        test: sp.test,
        runs,
        guarded_fits: guard.checks(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOutcome {
    pub report: EvalReport,
    /// Predictions of every model under the first seed.
    pub curves: Vec<PredictionCurve>,
    pub seed_runs: Vec<SeedRun>,
}

/// [`run_seed`] for each seed, aggregated into mean ± std per model.
pub fn run_benchmark(
    title: &str,
    source: &dyn DescriptorSource,
    models: &[ModelSpec],
    config: &PipelineConfig,
    seeds: &[u64],
) -> Result<BenchmarkOutcome, EvalError> {
    if seeds.is_empty() {
        return Err(EvalError::InvalidConfig("at least one seed is required".into()));
    }
    if models.is_empty() {
        return Err(EvalError::InvalidConfig("no models selected".into()));
    }
    let seed_runs = seeds
        .iter()
        .map(|&s| run_seed(source, models, config, s))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = models
        .iter()
        .enumerate()
        .map(|(m, spec)| {
            let per_seed = seed_runs.iter().map(|s| (s.runs[m].r2, s.runs[m].rmse)).collect();
            ReportRow::from_runs(&spec.name, per_seed)
        })
        .collect();
    let y = source.targets();
    let curves = seed_runs[0]
        .runs
        .iter()
        .map(|r| PredictionCurve {
            model: r.model.clone(),
            truth: r.test.iter().map(|&i| y[i]).collect(),
            prediction: r.prediction.clone(),
        })
        .collect();
    Ok(BenchmarkOutcome {
        report: EvalReport {
            title: title.to_owned(),
            seeds: seeds.to_vec(),
            config_fingerprint: config.fingerprint(),
            dataset_fingerprint: source.content_hash(),
            rows,
        },
        curves,
        seed_runs,
    })
}

/// The four-row ablation: full model, plain cGAN, no autoencoder, fingerprint only.
pub fn run_ablation(
    source: &dyn DescriptorSource,
    config: &PipelineConfig,
    seeds: &[u64],
) -> Result<BenchmarkOutcome, EvalError> {
    run_benchmark("Ablation", source, &ModelSpec::ablation_set(), config, seeds)
}
