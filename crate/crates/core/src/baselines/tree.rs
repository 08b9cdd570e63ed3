use crate::codec::{Reader, Truncated, Writer};
use crate::nn::Matrix;

use super::BaselineError;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        value: f64,
        samples: usize,
    },
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Regression tree grown greedily by variance reduction. Node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
    pub max_depth: usize,
    pub min_leaf: usize,
}

/// The chosen split of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    /// Decrease in summed squared error.
    pub gain: f64,
}

fn sse(y: &[f64], idx: &[usize]) -> f64 {
    let n = idx.len() as f64;
    let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
    idx.iter().map(|&i| (y[i] - mean).powi(2)).sum()
}

/// Exhaustive scan over features in index order and thresholds at midpoints
/// of consecutive distinct values in ascending order. A candidate replaces
/// the incumbent only if its gain is larger by more than a relative 1e-12,
/// so exact and round-off ties keep the lowest feature, then the lowest threshold.
pub fn best_split(x: &Matrix, y: &[f64], idx: &[usize], min_leaf: usize) -> Option<SplitChoice> {
    let n = idx.len();
    let total_sum: f64 = idx.iter().map(|&i| y[i]).sum();
    let total_sq: f64 = idx.iter().map(|&i| y[i] * y[i]).sum();
    let parent = sse(y, idx);
    let mut best: Option<SplitChoice> = None;
    let mut order = idx.to_vec();
    for f in 0..x.ncols() {
        order.sort_by(|&a, &b| x[[a, f]].total_cmp(&x[[b, f]]).then(a.cmp(&b)));
        let (mut left_sum, mut left_sq) = (0.0, 0.0);
        for pos in 0..n - 1 {
            let i = order[pos];
            left_sum += y[i];
            left_sq += y[i] * y[i];
            let (lo, hi) = (x[[i, f]], x[[order[pos + 1], f]]);
            let left_n = pos + 1;
            if lo == hi || left_n < min_leaf || n - left_n < min_leaf {
                continue;
            }
            let right_n = n - left_n;
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let child = (left_sq - left_sum * left_sum / left_n as f64)
                + (right_sq - right_sum * right_sum / right_n as f64);
            let gain = parent - child;
            let better = match best {
                None => true,
                Some(b) => gain > b.gain + 1e-12 * (1.0 + b.gain.abs()),
            };
            if better {
                best = Some(SplitChoice {
                    feature: f,
                    threshold: 0.5 * (lo + hi),
                    gain,
                });
            }
        }
    }
    best.filter(|b| b.gain > 1e-12 * (1.0 + parent))
}

pub fn tree_fit(
    x: &Matrix,
    y: &[f64],
    max_depth: usize,
    min_leaf: usize,
) -> Result<TreeModel, BaselineError> {
    if y.len() != x.nrows() {
        return Err(BaselineError::DimensionMismatch {
            expected: x.nrows(),
            got: y.len(),
        });
    }
    if min_leaf == 0 {
        return Err(BaselineError::InvalidParameter("min_leaf must be positive".into()));
    }
    if x.nrows() < 2 * min_leaf {
        return Err(BaselineError::InsufficientData {
            needed: 2 * min_leaf,
            got: x.nrows(),
        });
    }
    let mut model = TreeModel {
        nodes: Vec::new(),
        max_depth,
        min_leaf,
    };
    let all: Vec<usize> = (0..x.nrows()).collect();
    model.grow(x, y, all, 0);
    Ok(model)
}

impl TreeModel {
    fn grow(&mut self, x: &Matrix, y: &[f64], idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let value = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
        self.nodes.push(TreeNode::Leaf {
            value,
            samples: idx.len(),
        });
        if depth >= self.max_depth || idx.len() < 2 * self.min_leaf {
            return id;
        }
        let Some(split) = best_split(x, y, &idx, self.min_leaf) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| x[[i, split.feature]] <= split.threshold);
        let left = self.grow(x, y, l, depth + 1);
        let right = self.grow(x, y, r, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    pub fn predict(&self, query: &[f64]) -> f64 {
        let mut node = 0;
        loop {
            match self.nodes[node] {
                TreeNode::Leaf { value, .. } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if query[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_sizes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Leaf { samples, .. } => Some(*samples),
                TreeNode::Split { .. } => None,
            })
            .collect()
    }

    pub fn write(&self, w: &mut Writer) {
        w.u32(self.max_depth as u32)
            .u32(self.min_leaf as u32)
            .u32(self.nodes.len() as u32);
        for n in &self.nodes {
            match *n {
                TreeNode::Leaf { value, samples } => {
                    w.u8(0).f64(value).u32(samples as u32);
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    w.u8(1)
                        .u32(feature as u32)
                        .f64(threshold)
                        .u32(left as u32)
                        .u32(right as u32);
                }
            }
        }
    }

    /// `Ok(None)` when the bytes decode but do not describe a valid tree.
    pub fn read(r: &mut Reader<'_>) -> Result<Option<Self>, Truncated> {
        let max_depth = r.u32()? as usize;
        let min_leaf = r.u32()? as usize;
        let count = r.u32()? as usize;
        let mut nodes = Vec::with_capacity(count.min(1 << 16));
        for _ in 0..count {
            let node = match r.u8()? {
                0 => TreeNode::Leaf {
                    value: r.f64()?,
                    samples: r.u32()? as usize,
                },
                1 => TreeNode::Split {
                    feature: r.u32()? as usize,
                    threshold: r.f64()?,
                    left: r.u32()? as usize,
                    right: r.u32()? as usize,
                },
                _ => return Ok(None),
            };
            nodes.push(node);
        }
        // Children always come after their parent, which rules out cycles.
        let valid = !nodes.is_empty()
            && nodes.iter().enumerate().all(|(i, n)| match *n {
                TreeNode::Leaf { .. } => true,
                TreeNode::Split { left, right, .. } => {
                    left > i && right > i && left < count && right < count
                }
            });
        Ok(valid.then_some(Self {
            nodes,
            max_depth,
            min_leaf,
        }))
    }
}
