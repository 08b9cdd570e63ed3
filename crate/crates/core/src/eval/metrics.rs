#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("length mismatch: {pred} predictions vs {truth} targets")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("metric needs at least {needed} values")]
    Empty { needed: usize },
    #[error("truth values are constant; R² is undefined")]
    ConstantTruth,
}

fn check(pred: &[f64], truth: &[f64], needed: usize) -> Result<(), MetricError> {
    if pred.len() != truth.len() {
        return Err(MetricError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.len() < needed {
        return Err(MetricError::Empty { needed });
    }
    Ok(())
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64, MetricError> {
    check(pred, truth, 1)?;
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum();
    Ok((sse / pred.len() as f64).sqrt())
}

/// `1 − SS_res / SS_tot`, with `SS_tot` taken about the mean of `truth`.
pub fn r2(pred: &[f64], truth: &[f64]) -> Result<f64, MetricError> {
    check(pred, truth, 2)?;
    let mean = truth.iter().sum::<f64>() / truth.len() as f64;
    let ss_tot: f64 = truth.iter().map(|t| (t - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(MetricError::ConstantTruth);
    }
    let ss_res: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, MetricError> {
    check(a, b, 2)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(MetricError::ConstantTruth);
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Ranks starting at 1; tied values share their average rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64, MetricError> {
    check(a, b, 2)?;
    pearson(&average_ranks(a), &average_ranks(b))
}
