use crate::codec::{Reader, Truncated, Writer};
use crate::nn::Matrix;

use super::BaselineError;

/// k-nearest-neighbour regressor over stored training rows (euclidean).
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub k: usize,
}

pub fn knn_fit(x: &Matrix, y: &[f64], k: usize) -> Result<KnnModel, BaselineError> {
    if y.len() != x.nrows() {
        return Err(BaselineError::DimensionMismatch {
            expected: x.nrows(),
            got: y.len(),
        });
    }
    if k == 0 || k > x.nrows() {
        return Err(BaselineError::InvalidParameter(format!(
            "k = {k} with {} training rows",
            x.nrows()
        )));
    }
    Ok(KnnModel {
        x: x.clone(),
        y: y.to_vec(),
        k,
    })
}

impl KnnModel {
    /// Indices of the `k` nearest training rows, nearest first; equal
    /// distances are ordered by training index.
    pub fn neighbors(&self, query: &[f64]) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .x
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let d: f64 = r.iter().zip(query).map(|(a, b)| (a - b).powi(2)).sum();
                (d, i)
            })
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        dist.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    pub fn predict(&self, query: &[f64]) -> f64 {
        let idx = self.neighbors(query);
        idx.iter().map(|&i| self.y[i]).sum::<f64>() / idx.len() as f64
    }

    pub fn write(&self, w: &mut Writer) {
        w.u32(self.k as u32)
            .u32(self.x.nrows() as u32)
            .u32(self.x.ncols() as u32)
            .f64s(self.x.as_slice().expect("standard layout"))
            .f64s(&self.y);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Truncated> {
        let k = r.u32()? as usize;
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        let values = r.f64s(rows * cols)?;
        Ok(Self {
            x: Matrix::from_shape_vec((rows, cols), values).expect("length matches shape"),
            y: r.f64s(rows)?,
            k,
        })
    }
}
