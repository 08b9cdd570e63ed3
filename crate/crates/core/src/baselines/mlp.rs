use crate::error::TrainError;
use crate::featurize::ScalarStandardizer;
use crate::nn::{
    check_finite, epoch_batches, grad_slices, mse_loss, select_rows, Activation, Adam, AdamConfig,
    Checkpoint, CheckpointError, Matrix, ModelKind, NnError, Parameterized, Prng, Sequential,
};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: vec![128, 64],
            epochs: 200,
            batch_size: 32,
            lr: 1e-3,
            seed: 1,
        }
    }
}

/// Feed-forward regressor `in → 128 → 64 → 1` trained on standardized targets.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub net: Sequential,
    pub target: ScalarStandardizer,
}

pub fn mlp_fit(x: &Matrix, y: &[f64], config: &MlpConfig) -> Result<MlpModel, TrainError> {
    if x.nrows() < 2 {
        return Err(TrainError::InsufficientData {
            needed: 2,
            got: x.nrows(),
        });
    }
    if y.len() != x.nrows() {
        return Err(NnError::DimensionMismatch {
            context: "mlp targets",
            expected: x.nrows(),
            got: y.len(),
        }
        .into());
    }
    if config.batch_size == 0 || config.hidden.contains(&0) {
        return Err(TrainError::InvalidConfig("mlp widths and batch size must be positive".into()));
    }
    check_finite("mlp inputs", x.iter()).map_err(TrainError::at("mlp input", 0, 0))?;
    let target = ScalarStandardizer::fit(y);
    let ys = Matrix::from_shape_fn((y.len(), 1), |(i, _)| target.forward(y[i]));

    let mut prng = Prng::new(config.seed);
    let mut widths = vec![x.ncols()];
    widths.extend(&config.hidden);
    widths.push(1);
    let mut net = Sequential::new(&widths, Activation::LeakyRelu, Activation::Identity, &mut prng);
    let mut adam = Adam::new(AdamConfig {
        lr: config.lr,
        ..AdamConfig::default()
    });
    for epoch in 0..config.epochs {
        for (b, idx) in epoch_batches(x.nrows(), config.batch_size, &mut prng)
            .into_iter()
            .enumerate()
        {
            let at = TrainError::at("mlp", epoch, b);
            let pred = net.forward(&select_rows(x, &idx)).map_err(&at)?;
            let (_, g) = mse_loss(&pred, &select_rows(&ys, &idx)).map_err(&at)?;
            let (grads, _) = net.backward(&g).map_err(&at)?;
            let slices = grad_slices(&grads);
            for s in &slices {
                check_finite("mlp gradient", s.iter()).map_err(&at)?;
            }
            adam.step(&mut net.param_slices_mut(), &slices)?;
        }
    }
    Ok(MlpModel { net, target })
}

impl MlpModel {
    pub fn predict_rows(&self, x: &Matrix) -> Result<Vec<f64>, NnError> {
        Ok(self
            .net
            .infer(x)?
            .iter()
            .map(|&v| self.target.inverse(v))
            .collect())
    }

    /// Network layers only; the target scaling travels separately.
    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint::new(ModelKind::Mlp).with_stack("mlp", self.net.layers.clone())
    }

    pub fn from_checkpoint(c: &Checkpoint, target: ScalarStandardizer) -> Result<Self, CheckpointError> {
        if c.kind != ModelKind::Mlp {
            return Err(CheckpointError::Structure("not an mlp".into()));
        }
        Ok(Self {
            net: Sequential::from_layers(c.stack("mlp")?.to_vec()),
            target,
        })
    }
}
