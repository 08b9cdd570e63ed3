//! Central-difference checks of every trainable component.

use probqsar::autoencoder::{Autoencoder, AutoencoderConfig};
use probqsar::nn::{
    grad_check, grad_slices, mse_loss, normal_matrix, relative_error, Activation, Dense, DenseGrads, Matrix,
    NoiseWiring, Prng, Sequential,
};
use probqsar::probcgan::{fgan_losses, Discriminator, Divergence, Generator};

pub const TOLERANCE: f64 = 1e-4;
pub const LINEAR_TOLERANCE: f64 = 1e-7;
const H: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub max_relative_error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_relative_error <= self.tolerance
    }
}

fn owned(grads: &[DenseGrads]) -> Vec<Vec<f64>> {
    grad_slices(grads).into_iter().map(<[f64]>::to_vec).collect()
}

fn check(name: impl Into<String>, err: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        max_relative_error: err,
        tolerance,
    }
}

fn sequential(widths: &[usize], hidden: Activation, seed: u64, tolerance: f64) -> Check {
    let mut prng = Prng::new(seed);
    let (mut net, x, y) = loop {
        let net = Sequential::new(widths, hidden, Activation::Identity, &mut prng);
        let x = normal_matrix(3, widths[0], &mut prng);
        let y = normal_matrix(3, *widths.last().unwrap(), &mut prng);
        if net.min_abs_preactivation(&x).unwrap() > 1e-3 {
            break (net, x, y);
        }
    };
    let out = net.forward(&x).unwrap();
    let (_, g) = mse_loss(&out, &y).unwrap();
    let (grads, _) = net.backward(&g).unwrap();
    let r = grad_check(&mut net, &owned(&grads), |n| mse_loss(&n.infer(&x).unwrap(), &y).unwrap().0, H, tolerance);
    check(format!("sequential {widths:?} {hidden:?}"), r.max_relative_error, tolerance)
}

fn dense(activation: Activation, seed: u64) -> Check {
    let mut prng = Prng::new(seed);
    let (mut layer, x, w) = loop {
        let layer = Dense::new(4, 5, activation, &mut prng);
        let x = normal_matrix(3, 4, &mut prng);
        let w = normal_matrix(3, 5, &mut prng);
        if layer.linear(&x).unwrap().iter().all(|a| a.abs() > 1e-3) {
            break (layer, x, w);
        }
    };
    layer.forward(&x).unwrap();
    let (grads, dx) = layer.backward(&w).unwrap();
    let analytic = owned(std::slice::from_ref(&grads));
    let loss = |l: &Dense, x: &Matrix| (&l.infer(x).unwrap() * &w).sum();
    let r = grad_check(&mut layer, &analytic, |l| loss(l, &x), H, TOLERANCE);
    let mut worst = r.max_relative_error;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            let (mut p, mut m) = (x.clone(), x.clone());
            p[[i, j]] += H;
            m[[i, j]] -= H;
            let num = (loss(&layer, &p) - loss(&layer, &m)) / (2.0 * H);
            worst = worst.max(relative_error(dx[[i, j]], num));
        }
    }
    check(format!("dense 4→5 {activation:?}"), worst, TOLERANCE)
}

fn autoencoder() -> Check {
    let mut prng = Prng::new(8);
    let cfg = AutoencoderConfig {
        hidden: 6,
        code: 3,
        ..AutoencoderConfig::default()
    };
    let mut ae = Autoencoder::new(7, &cfg, &mut prng);
    let x = normal_matrix(4, 7, &mut prng);
    let (_, grads) = ae.loss_and_grads(&x).unwrap();
    let r = grad_check(&mut ae, &grads, |m| m.reconstruction_mse(&x).unwrap(), H, TOLERANCE);
    check("autoencoder 7→6→3→6→7", r.max_relative_error, TOLERANCE)
}

fn generator(wiring: NoiseWiring) -> Check {
    let mut prng = Prng::new(11);
    let mut g = Generator::new(5, 3, &[6, 4], wiring, &mut prng);
    let x = normal_matrix(4, 5, &mut prng);
    let z = normal_matrix(4, 3, &mut prng);
    let w = normal_matrix(4, 1, &mut prng);
    g.forward(&x, &z).unwrap();
    let grads = g.backward(&w).unwrap();
    let r = grad_check(&mut g, &owned(&grads), |g| (&g.infer(&x, &z).unwrap() * &w).sum(), H, TOLERANCE);
    check(format!("generator {wiring:?}"), r.max_relative_error, TOLERANCE)
}

fn discriminator() -> Check {
    let mut prng = Prng::new(12);
    let mut d = Discriminator::new(5, 4, &mut prng);
    let x = normal_matrix(3, 5, &mut prng);
    let y = normal_matrix(3, 1, &mut prng);
    let w = normal_matrix(3, 1, &mut prng);
    d.forward(&x, &y).unwrap();
    let (grads, dy) = d.backward(&w).unwrap();
    let loss = |d: &Discriminator, y: &Matrix| (&d.infer(&x, y).unwrap() * &w).sum();
    let r = grad_check(&mut d, &owned(&grads), |d| loss(d, &y), H, TOLERANCE);
    let mut worst = r.max_relative_error;
    for i in 0..y.nrows() {
        let (mut p, mut m) = (y.clone(), y.clone());
        p[[i, 0]] += H;
        m[[i, 0]] -= H;
        let num = (loss(&d, &p) - loss(&d, &m)) / (2.0 * H);
        worst = worst.max(relative_error(dy[[i, 0]], num));
    }
    check("discriminator (parameters and activity input)", worst, TOLERANCE)
}

fn fgan(div: Divergence) -> Check {
    let t_real = [0.3, -1.2, 0.8, 0.05];
    let t_fake = [-0.4, 0.9, 0.1, 1.7, -2.0];
    let l = fgan_losses(div, &t_real, &t_fake).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..t_real.len() {
        let (mut p, mut m) = (t_real, t_real);
        p[i] += H;
        m[i] -= H;
        let num = (fgan_losses(div, &p, &t_fake).unwrap().discriminator_loss
            - fgan_losses(div, &m, &t_fake).unwrap().discriminator_loss)
            / (2.0 * H);
        worst = worst.max(relative_error(l.d_grad_real[i], num));
    }
    for i in 0..t_fake.len() {
        let (mut p, mut m) = (t_fake, t_fake);
        p[i] += H;
        m[i] -= H;
        let lp = fgan_losses(div, &t_real, &p).unwrap();
        let lm = fgan_losses(div, &t_real, &m).unwrap();
        worst = worst.max(relative_error(
            l.d_grad_fake[i],
            (lp.discriminator_loss - lm.discriminator_loss) / (2.0 * H),
        ));
        worst = worst.max(relative_error(
            l.g_grad_fake[i],
            (lp.generator_loss - lm.generator_loss) / (2.0 * H),
        ));
    }
    check(format!("f-GAN losses {}", div.name()), worst, TOLERANCE)
}

pub fn all_checks() -> Vec<Check> {
    let mut out = vec![
        sequential(&[4, 3, 2], Activation::Identity, 1, LINEAR_TOLERANCE),
        sequential(&[5, 6, 4, 2], Activation::LeakyRelu, 2, TOLERANCE),
    ];
    out.extend(
        [Activation::Identity, Activation::Relu, Activation::LeakyRelu, Activation::Tanh]
            .into_iter()
            .zip(20..)
            .map(|(a, s)| dense(a, s)),
    );
    out.push(autoencoder());
    out.push(generator(NoiseWiring::EveryLayer));
    out.push(generator(NoiseWiring::InputOnly));
    out.push(discriminator());
    out.extend(Divergence::ALL.into_iter().map(fgan));
    out
}
