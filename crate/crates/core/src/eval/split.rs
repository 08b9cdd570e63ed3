use crate::nn::Prng;

use super::EvalError;

pub const TRAIN_FRACTION: f64 = 0.8;
pub const MIN_SPLIT_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            train_fraction: TRAIN_FRACTION,
            seed,
        }
    }
}

/// Disjoint train/test index lists covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded Fisher-Yates permutation, then the first `round(fraction·n)`
/// indices train and the rest test. Both sides are kept non-empty.
pub fn split(n: usize, spec: &SplitSpec) -> Result<Split, EvalError> {
    if n < MIN_SPLIT_SAMPLES {
        return Err(EvalError::TooFewSamples {
            needed: MIN_SPLIT_SAMPLES,
            got: n,
        });
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(EvalError::InvalidConfig(format!(
            "train fraction {} outside (0, 1)",
            spec.train_fraction
        )));
    }
    let cut = ((spec.train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut order = Prng::new(spec.seed).permutation(n);
    let test = order.split_off(cut);
    Ok(Split { train: order, test })
}
