use crate::nn::NnError;

/// Failures of the training loops (autoencoder, GAN, MLP baseline).
#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("non-finite value in {tensor} during {stage} (epoch {epoch}, batch {batch})")]
    NonFinite {
        stage: &'static str,
        epoch: usize,
        batch: usize,
        tensor: String,
    },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Nn(#[from] NnError),
}

impl TrainError {
    /// Tags a non-finite failure with where in training it happened.
    pub(crate) fn at(stage: &'static str, epoch: usize, batch: usize) -> impl Fn(NnError) -> Self {
        move |e| match e {
            NnError::NonFiniteValue { tensor } => TrainError::NonFinite {
                stage,
                epoch,
                batch,
                tensor,
            },
            other => TrainError::Nn(other),
        }
    }
}
