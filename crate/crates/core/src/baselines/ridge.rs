use crate::codec::{Reader, Truncated, Writer};
use crate::nn::Matrix;

use super::BaselineError;

/// Linear model fitted by ridge regression on centered data.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

/// In-place Cholesky factorization `A = L Lᵀ` of a symmetric `n × n`
/// row-major matrix; the lower triangle receives `L`. Fails when a pivot is
/// not safely positive relative to the largest diagonal entry.
fn cholesky(a: &mut [f64], n: usize) -> Result<(), BaselineError> {
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let floor = scale * 1e-12;
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > floor) {
            return Err(BaselineError::SingularSystem);
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    Ok(())
}

/// Solves `L Lᵀ x = b` given the factor from [`cholesky`].
fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i * n + i];
    }
    x
}

/// Centered normal equations `(XcᵀXc + λI, Xcᵀyc)` plus column and target means.
fn normal_equations(x: &Matrix, y: &[f64], lambda: f64) -> (Matrix, Vec<f64>, Vec<f64>, f64) {
    let n = x.nrows() as f64;
    let means: Vec<f64> = x.columns().into_iter().map(|c| c.sum() / n).collect();
    let y_mean = y.iter().sum::<f64>() / n;
    let mut xc = x.clone();
    for (mut row, _) in xc.rows_mut().into_iter().zip(0..) {
        row.iter_mut().zip(&means).for_each(|(v, m)| *v -= m);
    }
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut a = xc.t().dot(&xc);
    for i in 0..a.nrows() {
        a[[i, i]] += lambda;
    }
    let b = xc.t().dot(&ndarray::ArrayView1::from(&yc)).to_vec();
    (a, b, means, y_mean)
}

pub fn ridge_fit(x: &Matrix, y: &[f64], lambda: f64) -> Result<RidgeModel, BaselineError> {
    if x.nrows() < 2 {
        return Err(BaselineError::InsufficientData {
            needed: 2,
            got: x.nrows(),
        });
    }
    if y.len() != x.nrows() {
        return Err(BaselineError::DimensionMismatch {
            expected: x.nrows(),
            got: y.len(),
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(BaselineError::InvalidParameter(format!("lambda {lambda}")));
    }
    let d = x.ncols();
    let (a, b, means, y_mean) = normal_equations(x, y, lambda);
    let mut l = a.into_raw_vec_and_offset().0;
    cholesky(&mut l, d)?;
    let weights = cholesky_solve(&l, d, &b);
    let intercept = y_mean - weights.iter().zip(&means).map(|(w, m)| w * m).sum::<f64>();
    Ok(RidgeModel {
        weights,
        intercept,
        lambda,
    })
}

impl RidgeModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Largest absolute entry of `(XcᵀXc + λI)w − Xcᵀyc` on the data the model was fitted to.
    pub fn normal_equation_residual(&self, x: &Matrix, y: &[f64]) -> f64 {
        let (a, b, _, _) = normal_equations(x, y, self.lambda);
        let aw = a.dot(&ndarray::ArrayView1::from(&self.weights));
        aw.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    }

    pub fn write(&self, w: &mut Writer) {
        w.f64(self.lambda)
            .f64(self.intercept)
            .u32(self.weights.len() as u32)
            .f64s(&self.weights);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Truncated> {
        let lambda = r.f64()?;
        let intercept = r.f64()?;
        let n = r.u32()? as usize;
        Ok(Self {
            weights: r.f64s(n)?,
            intercept,
            lambda,
        })
    }
}
