//! A small dense-network engine: layers with analytic backprop, MSE, Adam,
//! a finite-difference gradient checker and a binary checkpoint format.
//!
//! Matrices are `ndarray` arrays of `f64` holding one sample per row.

mod adam;
mod checkpoint;
mod gradcheck;
mod layer;
mod loss;
mod prng;
mod sequential;

pub use adam::{Adam, AdamConfig};
pub use checkpoint::{Checkpoint, CheckpointError, DivergenceTag, ModelKind, NoiseWiring};
pub use gradcheck::{grad_check, relative_error, GradCheckReport};
pub use layer::{Activation, Dense, DenseGrads, Matrix, Vector, LEAKY_SLOPE};
pub use loss::mse_loss;
pub use prng::Prng;
pub use sequential::{grad_slices, Parameterized, Sequential};

#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in {tensor}")]
    NonFiniteValue { tensor: String },
    #[error("backward called without a cached forward pass")]
    NoCachedForward,
    #[error("empty batch")]
    EmptyBatch,
}

/// Fails with [`NnError::NonFiniteValue`] naming `tensor` if any entry is NaN or infinite.
pub fn check_finite<'a, I>(tensor: &str, values: I) -> Result<(), NnError>
where
    I: IntoIterator<Item = &'a f64>,
{
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(NnError::NonFiniteValue {
            tensor: tensor.to_owned(),
        })
    }
}

/// Shuffled mini-batches of `0..n` for one epoch. The last partial batch is kept.
pub fn epoch_batches(n: usize, batch_size: usize, prng: &mut Prng) -> Vec<Vec<usize>> {
    let order = prng.permutation(n);
    order.chunks(batch_size.max(1)).map(<[usize]>::to_vec).collect()
}

pub fn batches_per_epoch(n: usize, batch_size: usize) -> usize {
    n.div_ceil(batch_size.max(1))
}

/// `rows × cols` matrix of independent standard-normal draws, filled row by row.
pub fn normal_matrix(rows: usize, cols: usize, prng: &mut Prng) -> Matrix {
    Matrix::from_shape_simple_fn((rows, cols), || prng.normal())
}

/// Rows of `m` at `indices`, in order.
pub fn select_rows(m: &Matrix, indices: &[usize]) -> Matrix {
    m.select(ndarray::Axis(0), indices)
}
