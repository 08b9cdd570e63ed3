//! Heteroscedastic regression task with known conditional mean and noise.
//!
//! `x ~ U[−1, 1]^203`, `y = sin(2·w·x) + ε`, `ε ~ N(0, σ(x)²)` with
//! `σ(x) = 0.05 + 0.45·sigmoid(v·x)`. The directions `w` and `v` are drawn
//! from the seed and scaled so that `w·x` and `v·x` have standard deviations
//! [`SIGNAL_SPREAD`] and [`NOISE_SPREAD`] over the cube.

use crate::nn::{Matrix, Prng};

pub const SYNTHETIC_DIM: usize = 203;
pub const MIN_SYNTHETIC_SAMPLES: usize = 500;
pub const SIGNAL_SPREAD: f64 = 0.35;
pub const NOISE_SPREAD: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    pub x: Matrix,
    pub y: Vec<f64>,
    /// `sin(2·w·x)` per sample.
    pub true_mean: Vec<f64>,
    /// `σ(x)` per sample.
    pub true_std: Vec<f64>,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// A random direction scaled so its projection of `U[−1, 1]^d` has standard deviation `spread`.
fn direction(dim: usize, spread: f64, prng: &mut Prng) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| prng.normal()).collect();
    let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
    // Var(u·x) = |u|² / 3 for x uniform on the cube.
    let scale = spread * 3f64.sqrt() / norm;
    raw.into_iter().map(|a| a * scale).collect()
}

fn dot(a: &[f64], b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

impl SyntheticTask {
    /// `None` when `n` is below [`MIN_SYNTHETIC_SAMPLES`].
    pub fn generate(n: usize, seed: u64) -> Option<Self> {
        if n < MIN_SYNTHETIC_SAMPLES {
            return None;
        }
        let mut prng = Prng::new(seed);
        let w = direction(SYNTHETIC_DIM, SIGNAL_SPREAD, &mut prng);
        let v = direction(SYNTHETIC_DIM, NOISE_SPREAD, &mut prng);
        let x = Matrix::from_shape_simple_fn((n, SYNTHETIC_DIM), || prng.uniform_range(-1.0, 1.0));
        let mut y = Vec::with_capacity(n);
        let mut true_mean = Vec::with_capacity(n);
        let mut true_std = Vec::with_capacity(n);
        for row in x.rows() {
            let m = (2.0 * dot(&w, row)).sin();
            let s = 0.05 + 0.45 * sigmoid(dot(&v, row));
            y.push(m + s * prng.normal());
            true_mean.push(m);
            true_std.push(s);
        }
        Some(Self {
            x,
            y,
            true_mean,
            true_std,
            w,
            v,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Irreducible error on `indices`: root-mean of `σ(x)²`.
    pub fn bayes_rmse(&self, indices: &[usize]) -> f64 {
        let ss: f64 = indices.iter().map(|&i| self.true_std[i].powi(2)).sum();
        (ss / indices.len() as f64).sqrt()
    }
}
