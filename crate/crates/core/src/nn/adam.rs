use super::NnError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    /// Settings used for both adversarial players.
    pub fn gan() -> Self {
        Self {
            lr: 2e-4,
            beta1: 0.5,
            ..Self::default()
        }
    }
}

/// Adam with bias correction. Moment buffers are allocated lazily on the
/// first step to match the parameter tensors passed in.
#[derive(Debug, Clone)]
pub struct Adam {
    pub config: AdamConfig,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    step: u64,
}

impl Adam {
    pub fn new(config: AdamConfig) -> Self {
        Self {
            config,
            first: Vec::new(),
            second: Vec::new(),
            step: 0,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One update of every parameter tensor from its gradient tensor.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<(), NnError> {
        if params.len() != grads.len() {
            return Err(NnError::DimensionMismatch {
                context: "adam tensor count",
                expected: params.len(),
                got: grads.len(),
            });
        }
        if self.first.is_empty() {
            self.first = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.second = self.first.clone();
        }
        if self.first.len() != params.len() {
            return Err(NnError::DimensionMismatch {
                context: "adam state tensor count",
                expected: self.first.len(),
                got: params.len(),
            });
        }
        for ((p, g), m) in params.iter().zip(grads).zip(&self.first) {
            if p.len() != g.len() || p.len() != m.len() {
                return Err(NnError::DimensionMismatch {
                    context: "adam tensor shape",
                    expected: p.len(),
                    got: g.len(),
                });
            }
        }

        self.step += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let bc1 = 1.0 - beta1.powi(self.step as i32);
        let bc2 = 1.0 - beta2.powi(self.step as i32);
        for (i, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let m = &mut self.first[i];
            let v = &mut self.second[i];
            for j in 0..p.len() {
                let gj = g[j];
                m[j] = beta1 * m[j] + (1.0 - beta1) * gj;
                v[j] = beta2 * v[j] + (1.0 - beta2) * gj * gj;
                let m_hat = m[j] / bc1;
                let v_hat = v[j] / bc2;
                p[j] -= lr * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}
