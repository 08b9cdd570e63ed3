//! Variational f-divergence objectives.
//!
//! The critic output `v` is mapped through an output activation `g_f`; the
//! discriminator maximizes `mean g_f(T_real) − mean f*(g_f(T_fake))` and the
//! generator minimizes `−mean f*(g_f(T_fake))`.

use crate::nn::{DivergenceTag, NnError};

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    #[default]
    PearsonChi2,
    Kl,
    Js,
}

pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Divergence {
    pub const ALL: [Divergence; 3] = [Divergence::PearsonChi2, Divergence::Kl, Divergence::Js];

    pub fn name(self) -> &'static str {
        match self {
            Divergence::PearsonChi2 => "pearson_chi2",
            Divergence::Kl => "kl",
            Divergence::Js => "js",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == name)
    }

    pub fn tag(self) -> DivergenceTag {
        match self {
            Divergence::PearsonChi2 => DivergenceTag::PearsonChi2,
            Divergence::Kl => DivergenceTag::Kl,
            Divergence::Js => DivergenceTag::Js,
        }
    }

    pub fn from_tag(tag: DivergenceTag) -> Option<Self> {
        match tag {
            DivergenceTag::PearsonChi2 => Some(Divergence::PearsonChi2),
            DivergenceTag::Kl => Some(Divergence::Kl),
            DivergenceTag::Js => Some(Divergence::Js),
            DivergenceTag::None => None,
        }
    }

    /// Output activation `g_f(v)`.
    pub fn activation(self, v: f64) -> f64 {
        match self {
            Divergence::PearsonChi2 | Divergence::Kl => v,
            Divergence::Js => LN_2 - softplus(-v),
        }
    }

    fn activation_grad(self, v: f64) -> f64 {
        match self {
            Divergence::PearsonChi2 | Divergence::Kl => 1.0,
            Divergence::Js => sigmoid(-v),
        }
    }

    /// Convex conjugate `f*(t)`.
    pub fn conjugate(self, t: f64) -> f64 {
        match self {
            Divergence::PearsonChi2 => t * t / 4.0 + t,
            Divergence::Kl => (t - 1.0).exp(),
            Divergence::Js => -(2.0 - t.exp()).ln(),
        }
    }

    /// `f*(g_f(v))` and its derivative in `v`. The JS composite simplifies to
    /// `softplus(v) − ln 2`, which stays finite where the literal form would not.
    fn conjugate_of_activation(self, v: f64) -> (f64, f64) {
        match self {
            Divergence::PearsonChi2 => (v * v / 4.0 + v, v / 2.0 + 1.0),
            Divergence::Kl => {
                let e = (v - 1.0).exp();
                (e, e)
            }
            Divergence::Js => (softplus(v) - LN_2, sigmoid(v)),
        }
    }
}

/// Loss values and their gradients with respect to each critic output.
#[derive(Debug, Clone, PartialEq)]
pub struct FganLosses {
    /// Variational lower bound the discriminator maximizes.
    pub objective: f64,
    /// `−objective`, minimized by the discriminator.
    pub discriminator_loss: f64,
    pub generator_loss: f64,
    pub d_grad_real: Vec<f64>,
    pub d_grad_fake: Vec<f64>,
    pub g_grad_fake: Vec<f64>,
}

/// The generator's loss `−mean f*(g_f(T_fake))` and its gradient.
pub fn generator_loss(div: Divergence, t_fake: &[f64]) -> Result<(f64, Vec<f64>), NnError> {
    if t_fake.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    let n = t_fake.len() as f64;
    let mut loss = 0.0;
    let grad = t_fake
        .iter()
        .map(|&v| {
            let (c, dc) = div.conjugate_of_activation(v);
            loss -= c / n;
            -dc / n
        })
        .collect::<Vec<_>>();
    if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(NnError::NonFiniteValue {
            tensor: "generator loss".into(),
        });
    }
    Ok((loss, grad))
}

pub fn fgan_losses(div: Divergence, t_real: &[f64], t_fake: &[f64]) -> Result<FganLosses, NnError> {
    if t_real.is_empty() || t_fake.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    let nr = t_real.len() as f64;
    let real_term = t_real.iter().map(|&v| div.activation(v)).sum::<f64>() / nr;
    let d_grad_real: Vec<f64> = t_real
        .iter()
        .map(|&v| -div.activation_grad(v) / nr)
        .collect();
    let (generator_loss, g_grad_fake) = generator_loss(div, t_fake)?;
    let d_grad_fake: Vec<f64> = g_grad_fake.iter().map(|g| -g).collect();
    let objective = real_term + generator_loss;
    if !objective.is_finite() || d_grad_real.iter().any(|g| !g.is_finite()) {
        return Err(NnError::NonFiniteValue {
            tensor: "discriminator objective".into(),
        });
    }
    Ok(FganLosses {
        objective,
        discriminator_loss: -objective,
        generator_loss,
        d_grad_real,
        d_grad_fake,
        g_grad_fake,
    })
}
