use super::{check_finite, Matrix, NnError};

/// Mean squared error over all entries, with its gradient `2 (pred − target) / N`.
pub fn mse_loss(pred: &Matrix, target: &Matrix) -> Result<(f64, Matrix), NnError> {
    if pred.dim() != target.dim() {
        return Err(NnError::DimensionMismatch {
            context: "mse operands",
            expected: target.len(),
            got: pred.len(),
        });
    }
    let n = pred.len().max(1) as f64;
    let diff = pred - target;
    let loss = diff.iter().map(|d| d * d).sum::<f64>() / n;
    check_finite("mse loss", [&loss])?;
    Ok((loss, diff * (2.0 / n)))
}
