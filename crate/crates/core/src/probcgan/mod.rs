//! Probabilistic conditional GAN regressor.
//!
//! A generator maps (condition, noise) to an activity; a dual-pathway critic
//! trained with a variational f-divergence objective pushes the generated
//! conditional distribution toward the observed one. Repeated draws of the
//! noise for one condition give a predictive distribution whose mean is the
//! point estimate and whose spread is the uncertainty.

mod fgan;
mod networks;
mod train;

use std::num::NonZeroUsize;

pub use fgan::{fgan_losses, generator_loss, Divergence, FganLosses};
pub use networks::{Discriminator, Generator};
pub use train::{train, train_step, GanConfig, GanState, StepDiagnostics, MIN_TRAINING_PAIRS};

use crate::error::TrainError;
use crate::featurize::ScalarStandardizer;
use crate::nn::{normal_matrix, Matrix, NnError, Prng};

/// Empirical distribution of generator outputs for one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveDistribution {
    samples: Vec<f64>,
}

impl PredictiveDistribution {
    /// `None` when `samples` is empty.
    pub fn new(samples: Vec<f64>) -> Option<Self> {
        (!samples.is_empty()).then_some(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean, accumulated as offsets from the first sample so that identical
    /// samples give exactly that value.
    pub fn mean(&self) -> f64 {
        let first = self.samples[0];
        first + self.samples.iter().map(|v| v - first).sum::<f64>() / self.samples.len() as f64
    }

    /// Population standard deviation (divides by K, so K = 1 gives 0).
    pub fn std(&self) -> f64 {
        let m = self.mean();
        let var = self.samples.iter().map(|v| (v - m).powi(2)).sum::<f64>() / self.samples.len() as f64;
        var.sqrt()
    }

    /// Linear interpolation between order statistics; `q` is clamped to `[0, 1]`.
    pub fn quantile(&self, q: f64) -> f64 {
        let mut sorted = self.samples.clone();
        sorted.sort_by(f64::total_cmp);
        let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            samples: self.samples.into_iter().map(f).collect(),
        }
    }
}

/// Generator outputs for one condition row under each row of `z`.
pub fn predict_with_noise(g: &Generator, x: &[f64], z: &Matrix) -> Result<PredictiveDistribution, NnError> {
    let cond = Matrix::from_shape_fn((z.nrows(), x.len()), |(_, j)| x[j]);
    let out = g.infer(&cond, z)?;
    PredictiveDistribution::new(out.into_raw_vec_and_offset().0).ok_or(NnError::EmptyBatch)
}

/// `k` independent standard-normal noise draws through `g` for condition `x`.
pub fn predict(
    g: &Generator,
    x: &[f64],
    k: NonZeroUsize,
    prng: &mut Prng,
) -> Result<PredictiveDistribution, NnError> {
    let z = normal_matrix(k.get(), g.noise_dim, prng);
    predict_with_noise(g, x, &z)
}

/// [`predict`] for every row of `x`, drawing noise row after row from `prng`.
pub fn predict_batch(
    g: &Generator,
    x: &Matrix,
    k: NonZeroUsize,
    prng: &mut Prng,
) -> Result<Vec<PredictiveDistribution>, NnError> {
    const ROWS_PER_CHUNK: usize = 32;
    let k = k.get();
    let mut out = Vec::with_capacity(x.nrows());
    let rows: Vec<_> = x.rows().into_iter().collect();
    for chunk in rows.chunks(ROWS_PER_CHUNK) {
        let m = chunk.len() * k;
        let cond = Matrix::from_shape_fn((m, x.ncols()), |(i, j)| chunk[i / k][j]);
        let z = normal_matrix(m, g.noise_dim, prng);
        let y = g.infer(&cond, &z)?;
        let y = y.as_slice().expect("fresh matrix is contiguous");
        out.extend(
            y.chunks(k)
                .map(|s| PredictiveDistribution::new(s.to_vec()).expect("k ≥ 1")),
        );
    }
    Ok(out)
}

/// A trained generator/critic pair with the activity scaling used in training.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbCgan {
    pub generator: Generator,
    pub discriminator: Discriminator,
    pub divergence: Divergence,
    pub target: ScalarStandardizer,
    pub history: Vec<StepDiagnostics>,
}

impl ProbCgan {
    /// Standardizes `y` with its own mean/std, then trains from a fresh
    /// initialization drawn from `config.seed`.
    pub fn fit(x: &Matrix, y: &[f64], config: &GanConfig) -> Result<Self, TrainError> {
        config.validate()?;
        let target = ScalarStandardizer::fit(y);
        let scaled: Vec<f64> = y.iter().map(|&v| target.forward(v)).collect();
        let mut prng = Prng::new(config.seed);
        let mut state = GanState::new(x.ncols(), config, &mut prng);
        let history = train(&mut state, x, &scaled, config, &mut prng)?;
        Ok(Self {
            generator: state.generator,
            discriminator: state.discriminator,
            divergence: config.divergence,
            target,
            history,
        })
    }

    pub fn cond_dim(&self) -> usize {
        self.generator.cond_dim
    }

    /// Predictive distribution in original activity units.
    pub fn predict(&self, x: &[f64], k: NonZeroUsize, prng: &mut Prng) -> Result<PredictiveDistribution, NnError> {
        let t = self.target;
        Ok(predict(&self.generator, x, k, prng)?.map(|v| t.inverse(v)))
    }

    pub fn predict_batch(
        &self,
        x: &Matrix,
        k: NonZeroUsize,
        prng: &mut Prng,
    ) -> Result<Vec<PredictiveDistribution>, NnError> {
        let t = self.target;
        Ok(predict_batch(&self.generator, x, k, prng)?
            .into_iter()
            .map(|d| d.map(|v| t.inverse(v)))
            .collect())
    }
}
