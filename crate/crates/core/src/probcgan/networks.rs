use ndarray::{concatenate, s, Axis};

use crate::nn::{
    Activation, Checkpoint, CheckpointError, Dense, DenseGrads, Matrix, ModelKind, NnError,
    NoiseWiring, Parameterized, Prng,
};

use super::Divergence;

fn hconcat(a: &Matrix, b: &Matrix) -> Matrix {
    concatenate(Axis(1), &[a.view(), b.view()]).expect("row counts checked by caller")
}

fn check_rows(context: &'static str, expected: usize, got: usize) -> Result<(), NnError> {
    if expected == got {
        Ok(())
    } else {
        Err(NnError::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}

/// Maps a condition `x` and noise `z` to one activity value.
///
/// The first layer sees `[x ‖ z]`. With [`NoiseWiring::EveryLayer`] every
/// later hidden layer sees `[h ‖ z]` as well; with [`NoiseWiring::InputOnly`]
/// it sees `h` alone. The output layer is `64 → 1` identity and never takes `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub layers: Vec<Dense>,
    pub cond_dim: usize,
    pub noise_dim: usize,
    pub wiring: NoiseWiring,
}

impl Generator {
    pub fn new(
        cond_dim: usize,
        noise_dim: usize,
        hidden: &[usize],
        wiring: NoiseWiring,
        prng: &mut Prng,
    ) -> Self {
        assert!(!hidden.is_empty(), "generator needs a hidden layer");
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut width = cond_dim;
        for (k, &h) in hidden.iter().enumerate() {
            let extra = if Self::noise_at(wiring, k, hidden.len() + 1) {
                noise_dim
            } else {
                0
            };
            layers.push(Dense::new(width + extra, h, Activation::LeakyRelu, prng));
            width = h;
        }
        layers.push(Dense::new(width, 1, Activation::Identity, prng));
        Self {
            layers,
            cond_dim,
            noise_dim,
            wiring,
        }
    }

    fn noise_at(wiring: NoiseWiring, k: usize, layer_count: usize) -> bool {
        k + 1 < layer_count && (k == 0 || wiring == NoiseWiring::EveryLayer)
    }

    /// Whether layer `k` receives `z` concatenated to its input.
    pub fn takes_noise(&self, k: usize) -> bool {
        Self::noise_at(self.wiring, k, self.layers.len())
    }

    fn check_inputs(&self, x: &Matrix, z: &Matrix) -> Result<(), NnError> {
        check_rows("generator condition width", self.cond_dim, x.ncols())?;
        check_rows("generator noise width", self.noise_dim, z.ncols())?;
        check_rows("generator noise rows", x.nrows(), z.nrows())
    }

    fn layer_input(&self, k: usize, h: Matrix, z: &Matrix) -> Matrix {
        if self.takes_noise(k) {
            hconcat(&h, z)
        } else {
            h
        }
    }

    /// Activities for each row of `(x, z)`; `n × 1`.
    pub fn infer(&self, x: &Matrix, z: &Matrix) -> Result<Matrix, NnError> {
        self.check_inputs(x, z)?;
        let mut h = x.clone();
        for (k, layer) in self.layers.iter().enumerate() {
            h = layer.infer(&self.layer_input(k, h, z))?;
        }
        Ok(h)
    }

    pub fn forward(&mut self, x: &Matrix, z: &Matrix) -> Result<Matrix, NnError> {
        self.check_inputs(x, z)?;
        let mut h = x.clone();
        for k in 0..self.layers.len() {
            let input = self.layer_input(k, h, z);
            h = self.layers[k].forward(&input)?;
        }
        Ok(h)
    }

    /// Per-layer gradients given `dL/d(output)`. Gradients flowing into `x`
    /// and `z` are dropped: the encoder is frozen and noise is not learned.
    pub fn backward(&mut self, upstream: &Matrix) -> Result<Vec<DenseGrads>, NnError> {
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut g = upstream.clone();
        for k in (0..self.layers.len()).rev() {
            let noise = self.takes_noise(k);
            let (lg, dx) = self.layers[k].backward(&g)?;
            grads.push(lg);
            g = if noise {
                let keep = dx.ncols() - self.noise_dim;
                dx.slice(s![.., ..keep]).to_owned()
            } else {
                dx
            };
        }
        grads.reverse();
        Ok(grads)
    }

    /// Zeroes every weight reading from `z`, making the output independent of the noise.
    pub fn zero_noise_weights(&mut self) {
        for k in 0..self.layers.len() {
            if self.takes_noise(k) {
                let w = &mut self.layers[k].weights;
                let start = w.ncols() - self.noise_dim;
                w.slice_mut(s![.., start..]).fill(0.0);
            }
        }
    }

    pub fn to_checkpoint(&self, divergence: Divergence) -> Checkpoint {
        let mut c = Checkpoint::new(ModelKind::Generator).with_stack("generator", self.layers.clone());
        c.noise_dim = self.noise_dim as u32;
        c.divergence = divergence.tag();
        c.wiring = self.wiring;
        c
    }

    pub fn from_checkpoint(c: &Checkpoint) -> Result<Self, CheckpointError> {
        if c.kind != ModelKind::Generator {
            return Err(CheckpointError::Structure("not a generator".into()));
        }
        if c.wiring == NoiseWiring::None {
            return Err(CheckpointError::Structure("generator without noise wiring".into()));
        }
        let layers = c.stack("generator")?.to_vec();
        let noise_dim = c.noise_dim as usize;
        let first = layers
            .first()
            .ok_or_else(|| CheckpointError::Structure("empty generator".into()))?;
        let cond_dim = first
            .inputs()
            .checked_sub(noise_dim)
            .ok_or_else(|| CheckpointError::Structure("noise wider than first layer".into()))?;
        let g = Self {
            layers,
            cond_dim,
            noise_dim,
            wiring: c.wiring,
        };
        g.validate_structure()
            .map_err(|e| CheckpointError::Structure(e.to_string()))?;
        Ok(g)
    }

    fn validate_structure(&self) -> Result<(), NnError> {
        let mut width = self.cond_dim;
        for (k, layer) in self.layers.iter().enumerate() {
            let extra = if self.takes_noise(k) { self.noise_dim } else { 0 };
            check_rows("generator layer input", width + extra, layer.inputs())?;
            width = layer.outputs();
        }
        check_rows("generator output", 1, width)
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(Dense::parameter_count).sum()
    }
}

impl Parameterized for Generator {
    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.param_slices_mut())
            .collect()
    }
}

/// Critic `T(x, y)`: separate condition and activity pathways merged into a
/// trunk ending in one raw, unbounded output.
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminator {
    pub condition: Dense,
    pub activity: Dense,
    pub trunk: Vec<Dense>,
}

impl Discriminator {
    /// Pathways `cond_dim → width` and `1 → width`, trunk `2·width → width → 1`.
    pub fn new(cond_dim: usize, width: usize, prng: &mut Prng) -> Self {
        Self {
            condition: Dense::new(cond_dim, width, Activation::LeakyRelu, prng),
            activity: Dense::new(1, width, Activation::LeakyRelu, prng),
            trunk: vec![
                Dense::new(2 * width, width, Activation::LeakyRelu, prng),
                Dense::new(width, 1, Activation::Identity, prng),
            ],
        }
    }

    pub fn cond_dim(&self) -> usize {
        self.condition.inputs()
    }

    /// The final layer's activation; identity by construction, never bounded.
    pub fn output_activation(&self) -> Activation {
        self.trunk[self.trunk.len() - 1].activation
    }

    fn check_inputs(&self, x: &Matrix, y: &Matrix) -> Result<(), NnError> {
        check_rows("discriminator activity width", 1, y.ncols())?;
        check_rows("discriminator activity rows", x.nrows(), y.nrows())
    }

    /// `T` for each row of `(x, y)`; `n × 1`.
    pub fn infer(&self, x: &Matrix, y: &Matrix) -> Result<Matrix, NnError> {
        self.check_inputs(x, y)?;
        let mut h = hconcat(&self.condition.infer(x)?, &self.activity.infer(y)?);
        for layer in &self.trunk {
            h = layer.infer(&h)?;
        }
        Ok(h)
    }

    pub fn forward(&mut self, x: &Matrix, y: &Matrix) -> Result<Matrix, NnError> {
        self.check_inputs(x, y)?;
        let hc = self.condition.forward(x)?;
        let ha = self.activity.forward(y)?;
        let mut h = hconcat(&hc, &ha);
        for layer in &mut self.trunk {
            h = layer.forward(&h)?;
        }
        Ok(h)
    }

    /// Gradients in [`Parameterized`] order (condition, activity, trunk) and `dL/dy`.
    pub fn backward(&mut self, upstream: &Matrix) -> Result<(Vec<DenseGrads>, Matrix), NnError> {
        let mut trunk_grads = Vec::with_capacity(self.trunk.len());
        let mut g = upstream.clone();
        for layer in self.trunk.iter_mut().rev() {
            let (lg, dx) = layer.backward(&g)?;
            trunk_grads.push(lg);
            g = dx;
        }
        trunk_grads.reverse();
        let split = self.condition.outputs();
        let (cond_grads, _) = self.condition.backward(&g.slice(s![.., ..split]).to_owned())?;
        let (act_grads, dy) = self.activity.backward(&g.slice(s![.., split..]).to_owned())?;
        let mut grads = vec![cond_grads, act_grads];
        grads.extend(trunk_grads);
        Ok((grads, dy))
    }

    pub fn to_checkpoint(&self, divergence: Divergence) -> Checkpoint {
        let mut c = Checkpoint::new(ModelKind::Discriminator)
            .with_stack("condition", vec![self.condition.clone()])
            .with_stack("activity", vec![self.activity.clone()])
            .with_stack("trunk", self.trunk.clone());
        c.divergence = divergence.tag();
        c
    }

    pub fn from_checkpoint(c: &Checkpoint) -> Result<Self, CheckpointError> {
        if c.kind != ModelKind::Discriminator {
            return Err(CheckpointError::Structure("not a discriminator".into()));
        }
        let single = |name: &str| -> Result<Dense, CheckpointError> {
            match c.stack(name)? {
                [layer] => Ok(layer.clone()),
                _ => Err(CheckpointError::Structure(format!("{name} must be one layer"))),
            }
        };
        let d = Self {
            condition: single("condition")?,
            activity: single("activity")?,
            trunk: c.stack("trunk")?.to_vec(),
        };
        let bad = |m: &str| Err(CheckpointError::Structure(m.into()));
        if d.trunk.is_empty() || d.trunk[d.trunk.len() - 1].outputs() != 1 {
            return bad("trunk must end in one output");
        }
        if d.output_activation().is_bounded() {
            return bad("critic output must be unbounded");
        }
        if d.activity.inputs() != 1
            || d.trunk[0].inputs() != d.condition.outputs() + d.activity.outputs()
        {
            return bad("pathway widths do not match the trunk");
        }
        Ok(d)
    }
}

impl Parameterized for Discriminator {
    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut p: Vec<&mut [f64]> = self.condition.param_slices_mut().into();
        p.extend(self.activity.param_slices_mut());
        for l in &mut self.trunk {
            p.extend(l.param_slices_mut());
        }
        p
    }
}
