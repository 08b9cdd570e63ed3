use crate::codec::{Reader, Truncated, Writer};
use crate::nn::Matrix;

/// Per-column z-scoring of a contiguous column range; other columns pass through.
/// Columns with zero spread are only centered.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStandardizer {
    pub offset: usize,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl ColumnStandardizer {
    /// Statistics of columns `offset..offset + len` over the rows of `x`.
    pub fn fit(x: &Matrix, offset: usize, len: usize) -> Self {
        let n = x.nrows().max(1) as f64;
        let mut means = Vec::with_capacity(len);
        let mut stds = Vec::with_capacity(len);
        for c in offset..offset + len {
            let col = x.column(c);
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            means.push(mean);
            stds.push(if std > 1e-12 { std } else { 1.0 });
        }
        Self {
            offset,
            means,
            stds,
        }
    }

    /// Identity transform over no columns.
    pub fn identity() -> Self {
        Self {
            offset: 0,
            means: Vec::new(),
            stds: Vec::new(),
        }
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for (i, (m, s)) in self.means.iter().zip(&self.stds).enumerate() {
            out.column_mut(self.offset + i).mapv_inplace(|v| (v - m) / s);
        }
        out
    }

    pub fn apply_row(&self, row: &mut [f64]) {
        for (i, (m, s)) in self.means.iter().zip(&self.stds).enumerate() {
            let v = &mut row[self.offset + i];
            *v = (*v - m) / s;
        }
    }

    pub fn write(&self, w: &mut Writer) {
        w.u32(self.offset as u32)
            .u32(self.means.len() as u32)
            .f64s(&self.means)
            .f64s(&self.stds);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Truncated> {
        let offset = r.u32()? as usize;
        let len = r.u32()? as usize;
        Ok(Self {
            offset,
            means: r.f64s(len)?,
            stds: r.f64s(len)?,
        })
    }
}

/// Mean/std scaling of a scalar target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarStandardizer {
    pub mean: f64,
    pub std: f64,
}

impl ScalarStandardizer {
    pub fn fit(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        Self {
            mean,
            std: if std > 1e-12 { std } else { 1.0 },
        }
    }

    pub fn forward(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }

    pub fn inverse(&self, v: f64) -> f64 {
        v * self.std + self.mean
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn standardizes_only_the_selected_columns() {
        let x = array![[1.0, 2.0, 10.0], [1.0, 4.0, 10.0], [0.0, 6.0, 10.0]];
        let s = ColumnStandardizer::fit(&x, 1, 2);
        let y = s.apply(&x);
        assert_eq!(y.column(0), x.column(0));
        let col = y.column(1);
        assert!((col.sum()).abs() < 1e-12);
        assert!((col.iter().map(|v| v * v).sum::<f64>() / 3.0 - 1.0).abs() < 1e-12);
        // constant column: centered, not scaled
        assert!(y.column(2).iter().all(|v| *v == 0.0));

        let mut row = [1.0, 2.0, 10.0];
        s.apply_row(&mut row);
        assert_eq!(row.to_vec(), y.row(0).to_vec());
    }

    #[test]
    fn scalar_round_trip() {
        let s = ScalarStandardizer::fit(&[5.0, 7.0, 9.0]);
        assert_eq!(s.mean, 7.0);
        assert!((s.inverse(s.forward(8.3)) - 8.3).abs() < 1e-12);
    }
}
