//! Dense autoencoder compressing fused descriptors to a 203-d latent code.

use crate::error::TrainError;
use crate::nn::{
    check_finite, epoch_batches, grad_slices, mse_loss, select_rows, Activation, Adam, AdamConfig,
    Checkpoint, CheckpointError, Matrix, ModelKind, NnError, Parameterized, Prng, Sequential,
};

pub const LATENT_DIM: usize = 203;
const MIN_TRAINING_ROWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoencoderConfig {
    pub hidden: usize,
    pub code: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for AutoencoderConfig {
    fn default() -> Self {
        Self {
            hidden: 512,
            code: LATENT_DIM,
            epochs: 200,
            batch_size: 32,
            lr: 1e-3,
            seed: 1,
        }
    }
}

/// Encoder `in → hidden → code` and mirrored decoder; leaky-ReLU hidden
/// layers, identity code and output layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder {
    pub encoder: Sequential,
    pub decoder: Sequential,
    /// Full-data MSE before the first update.
    pub initial_loss: f64,
    /// Mean mini-batch MSE of each epoch.
    pub epoch_losses: Vec<f64>,
}

impl Autoencoder {
    pub fn new(input: usize, config: &AutoencoderConfig, prng: &mut Prng) -> Self {
        let encoder = Sequential::new(
            &[input, config.hidden, config.code],
            Activation::LeakyRelu,
            Activation::Identity,
            prng,
        );
        let decoder = Sequential::new(
            &[config.code, config.hidden, input],
            Activation::LeakyRelu,
            Activation::Identity,
            prng,
        );
        Self {
            encoder,
            decoder,
            initial_loss: f64::NAN,
            epoch_losses: Vec::new(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.input_width()
    }

    pub fn code_dim(&self) -> usize {
        self.encoder.output_width()
    }

    /// Latent codes, one row per input row.
    pub fn encode(&self, x: &Matrix) -> Result<Matrix, NnError> {
        self.encoder.infer(x)
    }

    pub fn decode(&self, code: &Matrix) -> Result<Matrix, NnError> {
        self.decoder.infer(code)
    }

    /// `decode(encode(x))` and the MSE of each row against its input.
    pub fn reconstruct(&self, x: &Matrix) -> Result<(Matrix, Vec<f64>), NnError> {
        let recon = self.decode(&self.encode(x)?)?;
        let per_row = recon
            .rows()
            .into_iter()
            .zip(x.rows())
            .map(|(r, o)| {
                r.iter().zip(o).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / o.len() as f64
            })
            .collect();
        Ok((recon, per_row))
    }

    /// Mean reconstruction MSE over all rows.
    pub fn reconstruction_mse(&self, x: &Matrix) -> Result<f64, NnError> {
        let (_, per_row) = self.reconstruct(x)?;
        Ok(per_row.iter().sum::<f64>() / per_row.len().max(1) as f64)
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint::new(ModelKind::Autoencoder)
            .with_stack("encoder", self.encoder.layers.clone())
            .with_stack("decoder", self.decoder.layers.clone())
    }

    pub fn from_checkpoint(c: &Checkpoint) -> Result<Self, CheckpointError> {
        if c.kind != ModelKind::Autoencoder {
            return Err(CheckpointError::Structure("not an autoencoder".into()));
        }
        Ok(Self {
            encoder: Sequential::from_layers(c.stack("encoder")?.to_vec()),
            decoder: Sequential::from_layers(c.stack("decoder")?.to_vec()),
            initial_loss: f64::NAN,
            epoch_losses: Vec::new(),
        })
    }

    /// One forward/backward pass on `batch`; returns the loss and gradients
    /// in [`Parameterized`] order.
    pub fn loss_and_grads(&mut self, batch: &Matrix) -> Result<(f64, Vec<Vec<f64>>), NnError> {
        let code = self.encoder.forward(batch)?;
        let recon = self.decoder.forward(&code)?;
        let (loss, g) = mse_loss(&recon, batch)?;
        let (dec_grads, d_code) = self.decoder.backward(&g)?;
        let (enc_grads, _) = self.encoder.backward(&d_code)?;
        let grads = grad_slices(&enc_grads)
            .into_iter()
            .chain(grad_slices(&dec_grads))
            .map(<[f64]>::to_vec)
            .collect();
        Ok((loss, grads))
    }
}

impl Parameterized for Autoencoder {
    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut p = self.encoder.param_slices_mut();
        p.extend(self.decoder.param_slices_mut());
        p
    }
}

/// Trains on the rows of `features` for a fixed number of epochs with Adam
/// on the reconstruction MSE. Deterministic given `config.seed`.
pub fn train_autoencoder(
    features: &Matrix,
    config: &AutoencoderConfig,
) -> Result<Autoencoder, TrainError> {
    if features.nrows() < MIN_TRAINING_ROWS {
        return Err(TrainError::InsufficientData {
            needed: MIN_TRAINING_ROWS,
            got: features.nrows(),
        });
    }
    if config.batch_size == 0 || config.hidden == 0 || config.code == 0 {
        return Err(TrainError::InvalidConfig(
            "autoencoder widths and batch size must be positive".into(),
        ));
    }
    check_finite("autoencoder training features", features.iter())
        .map_err(TrainError::at("autoencoder input", 0, 0))?;

    let mut prng = Prng::new(config.seed);
    let mut model = Autoencoder::new(features.ncols(), config, &mut prng);
    let mut adam = Adam::new(AdamConfig {
        lr: config.lr,
        ..AdamConfig::default()
    });
    model.initial_loss = model
        .reconstruction_mse(features)
        .map_err(TrainError::at("autoencoder", 0, 0))?;

    for epoch in 0..config.epochs {
        let mut total = 0.0;
        let mut seen = 0usize;
        for (b, idx) in epoch_batches(features.nrows(), config.batch_size, &mut prng)
            .into_iter()
            .enumerate()
        {
            let batch = select_rows(features, &idx);
            let (loss, grads) = model
                .loss_and_grads(&batch)
                .map_err(TrainError::at("autoencoder", epoch, b))?;
            let grad_refs: Vec<&[f64]> = grads.iter().map(Vec::as_slice).collect();
            adam.step(&mut model.param_slices_mut(), &grad_refs)?;
            total += loss * idx.len() as f64;
            seen += idx.len();
        }
        let epoch_loss = total / seen as f64;
        if !epoch_loss.is_finite() {
            return Err(TrainError::NonFinite {
                stage: "autoencoder",
                epoch,
                batch: 0,
                tensor: "epoch loss".into(),
            });
        }
        log::debug!("autoencoder epoch {epoch}: mse {epoch_loss:.6}");
        model.epoch_losses.push(epoch_loss);
    }
    Ok(model)
}
