use ndarray::{Array1, Array2, Axis};

use super::{check_finite, NnError, Prng};

pub type Matrix = Array2<f64>;
pub type Vector = Array1<f64>;

/// Slope of the leaky ReLU on the negative side.
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    LeakyRelu,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::LeakyRelu => {
                if v > 0.0 {
                    v
                } else {
                    LEAKY_SLOPE * v
                }
            }
            Activation::Tanh => v.tanh(),
            Activation::Identity => v,
        }
    }

    /// Derivative with respect to the pre-activation `v`.
    pub fn derivative(self, v: f64) -> f64 {
        match self {
            Activation::Relu => {
                if v > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if v > 0.0 {
                    1.0
                } else {
                    LEAKY_SLOPE
                }
            }
            Activation::Tanh => 1.0 - v.tanh().powi(2),
            Activation::Identity => 1.0,
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::LeakyRelu => 1,
            Activation::Tanh => 2,
            Activation::Identity => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => Activation::Relu,
            1 => Activation::LeakyRelu,
            2 => Activation::Tanh,
            3 => Activation::Identity,
            _ => return None,
        })
    }

    /// Whether the output range is bounded.
    pub fn is_bounded(self) -> bool {
        matches!(self, Activation::Tanh)
    }
}

#[derive(Debug, Clone)]
struct Cache {
    input: Matrix,
    pre: Matrix,
}

/// Fully connected layer `activation(x Wᵀ + b)` over a batch of row vectors.
#[derive(Debug, Clone)]
pub struct Dense {
    /// `out × in`
    pub weights: Matrix,
    pub bias: Vector,
    pub activation: Activation,
    cache: Option<Cache>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrads {
    pub weights: Matrix,
    pub bias: Vector,
}

impl DenseGrads {
    pub fn zeros_like(layer: &Dense) -> Self {
        Self {
            weights: Matrix::zeros(layer.weights.raw_dim()),
            bias: Vector::zeros(layer.bias.len()),
        }
    }

    pub fn slices(&self) -> [&[f64]; 2] {
        [
            self.weights.as_slice().expect("standard layout"),
            self.bias.as_slice().expect("standard layout"),
        ]
    }

    pub fn add_assign(&mut self, other: &DenseGrads) {
        self.weights += &other.weights;
        self.bias += &other.bias;
    }
}

impl PartialEq for Dense {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights
            && self.bias == other.bias
            && self.activation == other.activation
    }
}

impl Dense {
    /// He-uniform init for (leaky) ReLU layers, Xavier-uniform otherwise. Bias starts at zero.
    pub fn new(inputs: usize, outputs: usize, activation: Activation, prng: &mut Prng) -> Self {
        let limit = match activation {
            Activation::Relu | Activation::LeakyRelu => (6.0 / inputs as f64).sqrt(),
            Activation::Tanh | Activation::Identity => (6.0 / (inputs + outputs) as f64).sqrt(),
        };
        let weights = Matrix::from_shape_simple_fn((outputs, inputs), || {
            prng.uniform_range(-limit, limit)
        });
        Self::from_parts(weights, Vector::zeros(outputs), activation)
    }

    pub fn from_parts(weights: Matrix, bias: Vector, activation: Activation) -> Self {
        assert_eq!(weights.nrows(), bias.len(), "bias length must equal output width");
        // Keep standard layout so parameter slices are always available.
        let weights = if weights.is_standard_layout() {
            weights
        } else {
            weights.as_standard_layout().into_owned()
        };
        Self {
            weights,
            bias,
            activation,
            cache: None,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn pre_activation(&self, x: &Matrix) -> Result<Matrix, NnError> {
        if x.ncols() != self.inputs() {
            return Err(NnError::DimensionMismatch {
                context: "dense input",
                expected: self.inputs(),
                got: x.ncols(),
            });
        }
        let mut pre = x.dot(&self.weights.t());
        pre += &self.bias;
        Ok(pre)
    }

    /// `x Wᵀ + b` before the activation.
    pub fn linear(&self, x: &Matrix) -> Result<Matrix, NnError> {
        self.pre_activation(x)
    }

    /// Forward pass without caching; safe on shared references.
    pub fn infer(&self, x: &Matrix) -> Result<Matrix, NnError> {
        let act = self.activation;
        let out = self.pre_activation(x)?.mapv_into(|v| act.apply(v));
        check_finite("dense output", &out)?;
        Ok(out)
    }

    /// Forward pass that caches what [`Dense::backward`] needs.
    pub fn forward(&mut self, x: &Matrix) -> Result<Matrix, NnError> {
        let pre = self.pre_activation(x)?;
        let act = self.activation;
        let out = pre.mapv(|v| act.apply(v));
        check_finite("dense output", &out)?;
        self.cache = Some(Cache {
            input: x.clone(),
            pre,
        });
        Ok(out)
    }

    /// Gradients of the parameters and of the input, given `dL/d(output)`.
    /// Consumes the cached forward pass.
    pub fn backward(&mut self, upstream: &Matrix) -> Result<(DenseGrads, Matrix), NnError> {
        let cache = self.cache.take().ok_or(NnError::NoCachedForward)?;
        if upstream.dim() != cache.pre.dim() {
            return Err(NnError::DimensionMismatch {
                context: "dense upstream gradient",
                expected: cache.pre.ncols(),
                got: upstream.ncols(),
            });
        }
        let act = self.activation;
        let mut delta = cache.pre;
        delta.zip_mut_with(upstream, |p, &g| *p = g * act.derivative(*p));
        let grads = DenseGrads {
            weights: delta.t().dot(&cache.input),
            bias: delta.sum_axis(Axis(0)),
        };
        let dx = delta.dot(&self.weights);
        Ok((grads, dx))
    }

    pub fn param_slices_mut(&mut self) -> [&mut [f64]; 2] {
        [
            self.weights.as_slice_mut().expect("standard layout"),
            self.bias.as_slice_mut().expect("standard layout"),
        ]
    }

    pub fn param_slices(&self) -> [&[f64]; 2] {
        [
            self.weights.as_slice().expect("standard layout"),
            self.bias.as_slice().expect("standard layout"),
        ]
    }
}
