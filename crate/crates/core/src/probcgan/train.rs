use ndarray::{concatenate, Axis};

use crate::error::TrainError;
use crate::nn::{
    check_finite, epoch_batches, grad_slices, normal_matrix, select_rows, Adam, AdamConfig,
    DenseGrads, Matrix, NnError, NoiseWiring, Parameterized, Prng,
};

use super::{fgan_losses, generator_loss, Discriminator, Divergence, Generator};

pub const MIN_TRAINING_PAIRS: usize = 50;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GanConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr_generator: f64,
    pub lr_discriminator: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Discriminator updates per generator update.
    pub d_steps: usize,
    pub noise_dim: usize,
    pub divergence: Divergence,
    pub wiring: NoiseWiring,
    pub generator_hidden: Vec<usize>,
    /// Width of each discriminator pathway and of the trunk's hidden layer.
    pub discriminator_width: usize,
    /// Generator draws per prediction.
    pub samples: usize,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for GanConfig {
    fn default() -> Self {
        let adam = AdamConfig::gan();
        Self {
            epochs: 300,
            batch_size: 32,
            lr_generator: adam.lr,
            lr_discriminator: adam.lr,
            beta1: adam.beta1,
            beta2: adam.beta2,
            d_steps: 1,
            noise_dim: 32,
            divergence: Divergence::PearsonChi2,
            wiring: NoiseWiring::EveryLayer,
            generator_hidden: vec![256, 128, 64],
            discriminator_width: 128,
            samples: 100,
            seed: 1,
        }
    }
}

impl GanConfig {
    /// The plain conditional-GAN variant: noise at the input layer only, JS objective.
    pub fn cgan() -> Self {
        Self::cgan_from(&Self::default())
    }

    /// `base` switched to the plain conditional-GAN variant.
    pub fn cgan_from(base: &Self) -> Self {
        Self {
            divergence: Divergence::Js,
            wiring: NoiseWiring::InputOnly,
            ..base.clone()
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let positive = [
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("d_steps", self.d_steps),
            ("noise_dim", self.noise_dim),
            ("discriminator_width", self.discriminator_width),
            ("samples", self.samples),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(TrainError::InvalidConfig(format!("{name} must be positive")));
        }
        if self.generator_hidden.is_empty() || self.generator_hidden.contains(&0) {
            return Err(TrainError::InvalidConfig(
                "generator_hidden must list positive widths".into(),
            ));
        }
        if self.wiring == NoiseWiring::None {
            return Err(TrainError::InvalidConfig("generator needs noise wiring".into()));
        }
        let rates = [self.lr_generator, self.lr_discriminator];
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(TrainError::InvalidConfig("learning rates must be ≥ 0".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(TrainError::InvalidConfig("Adam betas must lie in [0, 1)".into()));
        }
        Ok(())
    }

    fn adam(&self, lr: f64) -> Adam {
        Adam::new(AdamConfig {
            lr,
            beta1: self.beta1,
            beta2: self.beta2,
            ..AdamConfig::default()
        })
    }
}

/// Both players plus their optimizers.
#[derive(Debug, Clone)]
pub struct GanState {
    pub generator: Generator,
    pub discriminator: Discriminator,
    opt_generator: Adam,
    opt_discriminator: Adam,
}

impl GanState {
    pub fn new(cond_dim: usize, config: &GanConfig, prng: &mut Prng) -> Self {
        let generator = Generator::new(
            cond_dim,
            config.noise_dim,
            &config.generator_hidden,
            config.wiring,
            prng,
        );
        let discriminator = Discriminator::new(cond_dim, config.discriminator_width, prng);
        Self::from_parts(generator, discriminator, config)
    }

    pub fn from_parts(generator: Generator, discriminator: Discriminator, config: &GanConfig) -> Self {
        Self {
            generator,
            discriminator,
            opt_generator: config.adam(config.lr_generator),
            opt_discriminator: config.adam(config.lr_discriminator),
        }
    }
}

/// Scalars recorded after each generator update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub discriminator_loss: f64,
    pub generator_loss: f64,
    pub mean_t_real: f64,
    pub mean_t_fake: f64,
}

fn checked_grads(grads: &[DenseGrads]) -> Result<Vec<&[f64]>, NnError> {
    let slices = grad_slices(grads);
    for s in &slices {
        check_finite("gradient", s.iter())?;
    }
    Ok(slices)
}

fn column(values: Vec<f64>) -> Matrix {
    let n = values.len();
    Matrix::from_shape_vec((n, 1), values).expect("column shape")
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `config.d_steps` critic updates, each on fresh standard-normal noise,
/// followed by one generator update. `y` is `n × 1`.
pub fn train_step(
    state: &mut GanState,
    x: &Matrix,
    y: &Matrix,
    config: &GanConfig,
    prng: &mut Prng,
) -> Result<StepDiagnostics, NnError> {
    let n = x.nrows();
    if n == 0 {
        return Err(NnError::EmptyBatch);
    }
    if y.dim() != (n, 1) {
        return Err(NnError::DimensionMismatch {
            context: "activity batch rows",
            expected: n,
            got: y.nrows(),
        });
    }
    let div = config.divergence;
    let noise = state.generator.noise_dim;
    let mut last = None;

    // Real and fake pairs go through the critic as one stacked batch.
    let xx = concatenate(Axis(0), &[x.view(), x.view()]).expect("same widths");
    for _ in 0..config.d_steps {
        let z = normal_matrix(n, noise, prng);
        let fake = state.generator.infer(x, &z)?;
        let yy = concatenate(Axis(0), &[y.view(), fake.view()]).expect("both n × 1");
        let t = state.discriminator.forward(&xx, &yy)?;
        let t = t.column(0).to_vec();
        let (t_real, t_fake) = t.split_at(n);
        let losses = fgan_losses(div, t_real, t_fake)?;
        let mut upstream = losses.d_grad_real.clone();
        upstream.extend_from_slice(&losses.d_grad_fake);
        let (grads, _) = state.discriminator.backward(&column(upstream))?;
        state
            .opt_discriminator
            .step(&mut state.discriminator.param_slices_mut(), &checked_grads(&grads)?)?;
        last = Some((losses.discriminator_loss, mean(t_real), mean(t_fake)));
    }

    let z = normal_matrix(n, noise, prng);
    let fake = state.generator.forward(x, &z)?;
    let t_fake = state.discriminator.forward(x, &fake)?.column(0).to_vec();
    let (g_loss, g_grad) = generator_loss(div, &t_fake)?;
    let (_, dy) = state.discriminator.backward(&column(g_grad))?;
    let grads = state.generator.backward(&dy)?;
    state
        .opt_generator
        .step(&mut state.generator.param_slices_mut(), &checked_grads(&grads)?)?;

    let (d_loss, mean_t_real, mean_t_fake) = last.expect("d_steps ≥ 1");
    Ok(StepDiagnostics {
        discriminator_loss: d_loss,
        generator_loss: g_loss,
        mean_t_real,
        mean_t_fake,
    })
}

/// Fixed-epoch alternating optimization over shuffled mini-batches; one
/// history entry per mini-batch.
pub fn train(
    state: &mut GanState,
    x: &Matrix,
    y: &[f64],
    config: &GanConfig,
    prng: &mut Prng,
) -> Result<Vec<StepDiagnostics>, TrainError> {
    config.validate()?;
    if x.nrows() < MIN_TRAINING_PAIRS {
        return Err(TrainError::InsufficientData {
            needed: MIN_TRAINING_PAIRS,
            got: x.nrows(),
        });
    }
    if y.len() != x.nrows() {
        return Err(NnError::DimensionMismatch {
            context: "training targets",
            expected: x.nrows(),
            got: y.len(),
        }
        .into());
    }
    check_finite("training conditions", x.iter()).map_err(TrainError::at("gan input", 0, 0))?;
    check_finite("training targets", y.iter()).map_err(TrainError::at("gan input", 0, 0))?;
    let y = column(y.to_vec());
    let mut history = Vec::new();
    for epoch in 0..config.epochs {
        for (b, idx) in epoch_batches(x.nrows(), config.batch_size, prng)
            .into_iter()
            .enumerate()
        {
            let xb = select_rows(x, &idx);
            let yb = select_rows(&y, &idx);
            let d = train_step(state, &xb, &yb, config, prng).map_err(TrainError::at("gan", epoch, b))?;
            let values = [d.discriminator_loss, d.generator_loss, d.mean_t_real, d.mean_t_fake];
            if values.iter().any(|v| !v.is_finite()) {
                return Err(TrainError::NonFinite {
                    stage: "gan",
                    epoch,
                    batch: b,
                    tensor: "step diagnostics".into(),
                });
            }
            history.push(d);
        }
        if let Some(d) = history.last() {
            log::debug!(
                "gan epoch {epoch}: d_loss {:.4} g_loss {:.4} T_real {:.3} T_fake {:.3}",
                d.discriminator_loss,
                d.generator_loss,
                d.mean_t_real,
                d.mean_t_fake
            );
        }
    }
    Ok(history)
}
