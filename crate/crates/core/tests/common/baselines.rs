//! Closed-form and brute-force references for the classical regressors.

use probqsar::nn::Matrix;

/// A tree grown by the textbook greedy rule, recomputing every child SSE from scratch.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleTree {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<OracleTree>,
        right: Box<OracleTree>,
    },
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sse(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|a| (a - m) * (a - m)).sum()
}

pub fn oracle_tree(x: &Matrix, y: &[f64], rows: &[usize], depth: usize, max_depth: usize, min_leaf: usize) -> OracleTree {
    let ys: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
    let leaf = OracleTree::Leaf(mean(&ys));
    if depth >= max_depth || rows.len() < 2 * min_leaf {
        return leaf;
    }
    let parent = sse(&ys);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..x.ncols() {
        let mut values: Vec<f64> = rows.iter().map(|&i| x[[i, f]]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let t = 0.5 * (pair[0] + pair[1]);
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[[i, f]] <= t);
            if l.len() < min_leaf || r.len() < min_leaf {
                continue;
            }
            let ly: Vec<f64> = l.iter().map(|&i| y[i]).collect();
            let ry: Vec<f64> = r.iter().map(|&i| y[i]).collect();
            let gain = parent - sse(&ly) - sse(&ry);
            if best.is_none_or(|(_, _, g)| gain > g + 1e-12 * (1.0 + g.abs())) {
                best = Some((f, t, gain));
            }
        }
    }
    match best {
        Some((feature, threshold, gain)) if gain > 1e-12 * (1.0 + parent) => {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[[i, feature]] <= threshold);
            OracleTree::Split {
                feature,
                threshold,
                left: Box::new(oracle_tree(x, y, &l, depth + 1, max_depth, min_leaf)),
                right: Box::new(oracle_tree(x, y, &r, depth + 1, max_depth, min_leaf)),
            }
        }
        _ => leaf,
    }
}

impl OracleTree {
    pub fn predict(&self, q: &[f64]) -> f64 {
        match self {
            OracleTree::Leaf(v) => *v,
            OracleTree::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if q[*feature] <= *threshold {
                    left.predict(q)
                } else {
                    right.predict(q)
                }
            }
        }
    }

    /// Pre-order `(feature, threshold)` of every split.
    pub fn splits(&self) -> Vec<(usize, f64)> {
        match self {
            OracleTree::Leaf(_) => vec![],
            OracleTree::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let mut out = vec![(*feature, *threshold)];
                out.extend(left.splits());
                out.extend(right.splits());
                out
            }
        }
    }
}

/// Mean target of the `k` closest rows, ties broken by row index.
pub fn oracle_knn(x: &Matrix, y: &[f64], k: usize, q: &[f64]) -> (Vec<usize>, f64) {
    let mut d: Vec<(f64, usize)> = (0..x.nrows())
        .map(|i| {
            let mut s = 0.0;
            for j in 0..x.ncols() {
                s += (x[[i, j]] - q[j]) * (x[[i, j]] - q[j]);
            }
            (s, i)
        })
        .collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx: Vec<usize> = d[..k].iter().map(|p| p.1).collect();
    let m = idx.iter().map(|&i| y[i]).sum::<f64>() / k as f64;
    (idx, m)
}

/// Largest entry of `|(XcᵀXc + λI)w − Xcᵀyc|`, built with plain loops.
pub fn ridge_stationarity(x: &Matrix, y: &[f64], lambda: f64, w: &[f64]) -> f64 {
    let (n, d) = x.dim();
    let xm: Vec<f64> = (0..d).map(|j| (0..n).map(|i| x[[i, j]]).sum::<f64>() / n as f64).collect();
    let ym = mean(y);
    let mut worst: f64 = 0.0;
    for a in 0..d {
        let mut lhs = lambda * w[a];
        let mut rhs = 0.0;
        for i in 0..n {
            let xa = x[[i, a]] - xm[a];
            let fitted: f64 = (0..d).map(|b| (x[[i, b]] - xm[b]) * w[b]).sum();
            lhs += xa * fitted;
            rhs += xa * (y[i] - ym);
        }
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}
