use super::{Activation, Dense, DenseGrads, Matrix, NnError, Prng};

/// Parameter tensors of a trainable module, in a fixed order.
pub trait Parameterized {
    fn param_slices_mut(&mut self) -> Vec<&mut [f64]>;
}

/// A plain stack of dense layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequential {
    pub layers: Vec<Dense>,
}

impl Sequential {
    /// Layers `widths[0] → widths[1] → …`, `hidden` activation everywhere except
    /// the last layer, which uses `output`.
    pub fn new(widths: &[usize], hidden: Activation, output: Activation, prng: &mut Prng) -> Self {
        assert!(widths.len() >= 2, "need at least an input and an output width");
        let last = widths.len() - 2;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let act = if i == last { output } else { hidden };
                Dense::new(w[0], w[1], act, prng)
            })
            .collect();
        Self { layers }
    }

    pub fn from_layers(layers: Vec<Dense>) -> Self {
        Self { layers }
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(Dense::parameter_count).sum()
    }

    pub fn infer(&self, x: &Matrix) -> Result<Matrix, NnError> {
        let mut h = x.clone();
        for layer in &self.layers {
            h = layer.infer(&h)?;
        }
        Ok(h)
    }

    pub fn forward(&mut self, x: &Matrix) -> Result<Matrix, NnError> {
        let mut h = x.clone();
        for layer in &mut self.layers {
            h = layer.forward(&h)?;
        }
        Ok(h)
    }

    /// Backprop through every layer; returns per-layer gradients and `dL/dx`.
    pub fn backward(&mut self, upstream: &Matrix) -> Result<(Vec<DenseGrads>, Matrix), NnError> {
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut g = upstream.clone();
        for layer in self.layers.iter_mut().rev() {
            let (lg, dx) = layer.backward(&g)?;
            grads.push(lg);
            g = dx;
        }
        grads.reverse();
        Ok((grads, g))
    }

    /// Smallest |pre-activation| over all layers for this batch; small values
    /// sit near an activation kink where finite differences are unreliable.
    pub fn min_abs_preactivation(&self, x: &Matrix) -> Result<f64, NnError> {
        let mut h = x.clone();
        let mut min = f64::INFINITY;
        for layer in &self.layers {
            let mut pre = h.dot(&layer.weights.t());
            pre += &layer.bias;
            min = pre.iter().fold(min, |m, v| m.min(v.abs()));
            h = layer.infer(&h)?;
        }
        Ok(min)
    }
}

impl Parameterized for Sequential {
    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.param_slices_mut())
            .collect()
    }
}

impl Parameterized for Dense {
    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        Dense::param_slices_mut(self).into()
    }
}

/// Flattens per-layer gradients into the order of [`Parameterized::param_slices_mut`].
pub fn grad_slices(grads: &[DenseGrads]) -> Vec<&[f64]> {
    grads.iter().flat_map(DenseGrads::slices).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{grad_check, mse_loss};

    fn owned(grads: &[DenseGrads]) -> Vec<Vec<f64>> {
        grad_slices(grads).into_iter().map(<[f64]>::to_vec).collect()
    }

    fn check_network(widths: &[usize], hidden: Activation, seed: u64, tol: f64) -> f64 {
        let mut prng = Prng::new(seed);
        let (mut net, x, y) = loop {
            let net = Sequential::new(widths, hidden, Activation::Identity, &mut prng);
            let x = Matrix::from_shape_simple_fn((3, widths[0]), || prng.normal());
            let y = Matrix::from_shape_simple_fn((3, *widths.last().unwrap()), || prng.normal());
            if net.min_abs_preactivation(&x).unwrap() > 1e-3 {
                break (net, x, y);
            }
        };
        let out = net.forward(&x).unwrap();
        let (_, g) = mse_loss(&out, &y).unwrap();
        let (grads, _) = net.backward(&g).unwrap();
        let analytic = owned(&grads);
        let report = grad_check(
            &mut net,
            &analytic,
            |n| mse_loss(&n.infer(&x).unwrap(), &y).unwrap().0,
            1e-5,
            tol,
        );
        assert!(report.passed, "{report:?}");
        report.max_relative_error
    }

    #[test]
    fn linear_network_mse_is_exact() {
        let err = check_network(&[4, 3, 2], Activation::Identity, 1, 1e-7);
        assert!(err < 1e-7);
    }

    #[test]
    fn three_layer_leaky_network() {
        check_network(&[5, 6, 4, 2], Activation::LeakyRelu, 2, 1e-4);
    }

    #[test]
    fn random_five_by_four_layer() {
        check_network(&[4, 5], Activation::Identity, 3, 1e-4);
        check_network(&[4, 5, 1], Activation::Tanh, 4, 1e-4);
        check_network(&[4, 5, 1], Activation::Relu, 5, 1e-4);
    }

    #[test]
    fn corrupted_gradient_fails_the_check() {
        let mut prng = Prng::new(9);
        let mut net = Sequential::new(&[3, 4, 1], Activation::Tanh, Activation::Identity, &mut prng);
        let x = Matrix::from_shape_simple_fn((3, 3), || prng.normal());
        let y = Matrix::from_shape_simple_fn((3, 1), || prng.normal());
        let out = net.forward(&x).unwrap();
        let (_, g) = mse_loss(&out, &y).unwrap();
        let (grads, _) = net.backward(&g).unwrap();
        let mut analytic = owned(&grads);
        for v in analytic.iter_mut().flatten() {
            *v *= 1.1;
        }
        let report = grad_check(
            &mut net,
            &analytic,
            |n| mse_loss(&n.infer(&x).unwrap(), &y).unwrap().0,
            1e-5,
            1e-4,
        );
        assert!(!report.passed);
        assert!(report.max_relative_error > 0.05);
    }

    #[test]
    fn forward_matches_infer() {
        let mut prng = Prng::new(3);
        let mut net = Sequential::new(&[3, 4, 2], Activation::LeakyRelu, Activation::Identity, &mut prng);
        let x = Matrix::from_shape_simple_fn((5, 3), || prng.normal());
        assert_eq!(net.forward(&x).unwrap(), net.infer(&x).unwrap());
        assert_eq!(net.parameter_count(), 3 * 4 + 4 + 4 * 2 + 2);
    }
}
