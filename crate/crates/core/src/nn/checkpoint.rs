//! Binary checkpoint shared by every trained network in the crate.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic        4 bytes  "PQNN"
//! version      u16      1
//! kind         u8       0 autoencoder, 1 mlp, 2 generator, 3 discriminator
//! noise_dim    u32      0 unless kind = generator
//! divergence   u8       0 none, 1 pearson_chi2, 2 kl, 3 js
//! wiring       u8       0 none, 1 noise at every layer, 2 noise at input only
//! stack_count  u16
//! per stack:
//!   name         u16 length + UTF-8
//!   layer_count  u16
//!   per layer:
//!     inputs     u32
//!     outputs    u32
//!     activation u8   0 relu, 1 leaky_relu(0.2), 2 tanh, 3 identity
//!     weights    outputs × inputs f64, row-major
//!     bias       outputs f64
//! ```

use crate::codec::{Reader, Truncated, Writer};

use super::{Activation, Dense, Matrix, Vector};

pub const MAGIC: &[u8; 4] = b"PQNN";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Autoencoder,
    Mlp,
    Generator,
    Discriminator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceTag {
    None,
    PearsonChi2,
    Kl,
    Js,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseWiring {
    None,
    EveryLayer,
    InputOnly,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a network checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u16),
    #[error("invalid {field} tag {value}")]
    BadTag { field: &'static str, value: u8 },
    #[error(transparent)]
    Truncated(#[from] Truncated),
    #[error("checkpoint has {0} unread trailing bytes")]
    TrailingBytes(usize),
    #[error("checkpoint structure: {0}")]
    Structure(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub kind: ModelKind,
    pub noise_dim: u32,
    pub divergence: DivergenceTag,
    pub wiring: NoiseWiring,
    pub stacks: Vec<(String, Vec<Dense>)>,
}

impl Checkpoint {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            noise_dim: 0,
            divergence: DivergenceTag::None,
            wiring: NoiseWiring::None,
            stacks: Vec::new(),
        }
    }

    pub fn with_stack(mut self, name: &str, layers: Vec<Dense>) -> Self {
        self.stacks.push((name.to_owned(), layers));
        self
    }

    pub fn stack(&self, name: &str) -> Result<&[Dense], CheckpointError> {
        self.stacks
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, l)| l.as_slice())
            .ok_or_else(|| CheckpointError::Structure(format!("missing stack {name:?}")))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(MAGIC).u16(VERSION);
        w.u8(match self.kind {
            ModelKind::Autoencoder => 0,
            ModelKind::Mlp => 1,
            ModelKind::Generator => 2,
            ModelKind::Discriminator => 3,
        });
        w.u32(self.noise_dim);
        w.u8(match self.divergence {
            DivergenceTag::None => 0,
            DivergenceTag::PearsonChi2 => 1,
            DivergenceTag::Kl => 2,
            DivergenceTag::Js => 3,
        });
        w.u8(match self.wiring {
            NoiseWiring::None => 0,
            NoiseWiring::EveryLayer => 1,
            NoiseWiring::InputOnly => 2,
        });
        w.u16(self.stacks.len() as u16);
        for (name, layers) in &self.stacks {
            w.str(name).u16(layers.len() as u16);
            for layer in layers {
                w.u32(layer.inputs() as u32)
                    .u32(layer.outputs() as u32)
                    .u8(layer.activation.tag());
                let [weights, bias] = layer.param_slices();
                w.f64s(weights).f64s(bias);
            }
        }
        w.into_bytes()
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, CheckpointError> {
        let mut r = Reader::new(data);
        if r.take(4)? != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(CheckpointError::UnsupportedVersion(version));
        }
        let kind = match r.u8()? {
            0 => ModelKind::Autoencoder,
            1 => ModelKind::Mlp,
            2 => ModelKind::Generator,
            3 => ModelKind::Discriminator,
            value => return Err(CheckpointError::BadTag { field: "kind", value }),
        };
        let noise_dim = r.u32()?;
        let divergence = match r.u8()? {
            0 => DivergenceTag::None,
            1 => DivergenceTag::PearsonChi2,
            2 => DivergenceTag::Kl,
            3 => DivergenceTag::Js,
            value => {
                return Err(CheckpointError::BadTag {
                    field: "divergence",
                    value,
                })
            }
        };
        let wiring = match r.u8()? {
            0 => NoiseWiring::None,
            1 => NoiseWiring::EveryLayer,
            2 => NoiseWiring::InputOnly,
            value => return Err(CheckpointError::BadTag { field: "wiring", value }),
        };
        let stack_count = r.u16()?;
        let mut stacks = Vec::with_capacity(stack_count as usize);
        for _ in 0..stack_count {
            let name = r.str()?;
            let layer_count = r.u16()?;
            let mut layers = Vec::with_capacity(layer_count as usize);
            for _ in 0..layer_count {
                let inputs = r.u32()? as usize;
                let outputs = r.u32()? as usize;
                let tag = r.u8()?;
                let activation = Activation::from_tag(tag).ok_or(CheckpointError::BadTag {
                    field: "activation",
                    value: tag,
                })?;
                let n = inputs
                    .checked_mul(outputs)
                    .ok_or_else(|| CheckpointError::Structure("layer too large".into()))?;
                let weights = r.f64s(n)?;
                let bias = r.f64s(outputs)?;
                let weights = Matrix::from_shape_vec((outputs, inputs), weights)
                    .map_err(|e| CheckpointError::Structure(e.to_string()))?;
                layers.push(Dense::from_parts(weights, Vector::from(bias), activation));
            }
            stacks.push((name, layers));
        }
        if r.remaining() != 0 {
            return Err(CheckpointError::TrailingBytes(r.remaining()));
        }
        Ok(Self {
            kind,
            noise_dim,
            divergence,
            wiring,
            stacks,
        })
    }
}
