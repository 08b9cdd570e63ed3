use std::fmt::Write as _;
use std::num::NonZeroUsize;

use crate::nn::Prng;
use crate::probcgan::{GanConfig, ProbCgan};

use super::split::{split, SplitSpec};
use super::synthetic::SyntheticTask;
use super::{r2, rmse, spearman, EvalError};

/// Draws per condition for the high/low-noise spread comparison.
pub const SPREAD_PROBE_SAMPLES: usize = 1000;
pub const MAX_BAYES_RATIO: f64 = 1.5;
pub const MIN_SPREAD_SPEARMAN: f64 = 0.5;

/// Prob-cGAN scored against the known noise of the synthetic task.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCheck {
    pub n: usize,
    pub seed: u64,
    pub test_size: usize,
    pub rmse: f64,
    pub bayes_rmse: f64,
    pub r2: f64,
    /// Rank correlation of predicted std with the true σ(x) on the test set.
    pub spread_spearman: f64,
    pub high_noise_sigma: f64,
    pub high_noise_std: f64,
    pub low_noise_sigma: f64,
    pub low_noise_std: f64,
}

impl SyntheticCheck {
    pub fn bayes_ratio(&self) -> f64 {
        self.rmse / self.bayes_rmse
    }

    pub fn rmse_ok(&self) -> bool {
        self.bayes_ratio() <= MAX_BAYES_RATIO
    }

    pub fn spread_ok(&self) -> bool {
        self.spread_spearman > MIN_SPREAD_SPEARMAN
    }

    pub fn ordering_ok(&self) -> bool {
        self.high_noise_std > self.low_noise_std
    }

    pub fn passed(&self) -> bool {
        self.rmse_ok() && self.spread_ok() && self.ordering_ok()
    }

    pub fn to_text(&self) -> String {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        let mut out = format!("Synthetic heteroscedastic check (n = {}, seed = {})\n", self.n, self.seed);
        let _ = writeln!(out, "test samples        {}", self.test_size);
        let _ = writeln!(out, "test RMSE           {:.4}", self.rmse);
        let _ = writeln!(out, "Bayes RMSE          {:.4}", self.bayes_rmse);
        let _ = writeln!(
            out,
            "RMSE / Bayes        {:.4}  (<= {MAX_BAYES_RATIO})  {}",
            self.bayes_ratio(),
            verdict(self.rmse_ok())
        );
        let _ = writeln!(out, "test R²             {:.4}", self.r2);
        let _ = writeln!(
            out,
            "Spearman(std, σ)    {:.4}  (> {MIN_SPREAD_SPEARMAN})  {}",
            self.spread_spearman,
            verdict(self.spread_ok())
        );
        let _ = writeln!(
            out,
            "high-noise input    σ {:.4}  predicted std {:.4}",
            self.high_noise_sigma, self.high_noise_std
        );
        let _ = writeln!(
            out,
            "low-noise input     σ {:.4}  predicted std {:.4}  {}",
            self.low_noise_sigma,
            self.low_noise_std,
            verdict(self.ordering_ok())
        );
        out
    }
}

/// Trains on 80% of a fresh synthetic task and scores the held-out rows.
/// The task inputs condition the generator directly.
pub fn run_synthetic_check(n: usize, seed: u64, gan: &GanConfig) -> Result<SyntheticCheck, EvalError> {
    let task = SyntheticTask::generate(n, seed).ok_or(EvalError::TooFewSamples {
        needed: super::MIN_SYNTHETIC_SAMPLES,
        got: n,
    })?;
    let sp = split(n, &SplitSpec::new(seed))?;
    let gan = GanConfig { seed, ..gan.clone() };
    let xt = crate::nn::select_rows(&task.x, &sp.train);
    let yt: Vec<f64> = sp.train.iter().map(|&i| task.y[i]).collect();
    let model = ProbCgan::fit(&xt, &yt, &gan)?;

    let xs = crate::nn::select_rows(&task.x, &sp.test);
    let mut prng = Prng::new(seed).split(0x7072_6564);
    let k = NonZeroUsize::new(gan.samples).expect("validated");
    let dists = model.predict_batch(&xs, k, &mut prng)?;
    let mean: Vec<f64> = dists.iter().map(|d| d.mean()).collect();
    let std: Vec<f64> = dists.iter().map(|d| d.std()).collect();
    let truth: Vec<f64> = sp.test.iter().map(|&i| task.y[i]).collect();
    let sigma: Vec<f64> = sp.test.iter().map(|&i| task.true_std[i]).collect();

    let by_sigma = |pick_max: bool| {
        let mut best = 0;
        for (j, s) in sigma.iter().enumerate() {
            let better = if pick_max { *s > sigma[best] } else { *s < sigma[best] };
            if better {
                best = j;
            }
        }
        best
    };
    let probe = NonZeroUsize::new(SPREAD_PROBE_SAMPLES).expect("positive");
    let (hi, lo) = (by_sigma(true), by_sigma(false));
    let hi_std = model.predict(&xs.row(hi).to_vec(), probe, &mut prng)?.std();
    let lo_std = model.predict(&xs.row(lo).to_vec(), probe, &mut prng)?.std();

    Ok(SyntheticCheck {
        n,
        seed,
        test_size: sp.test.len(),
        rmse: rmse(&mean, &truth)?,
        bayes_rmse: task.bayes_rmse(&sp.test),
        r2: r2(&mean, &truth)?,
        spread_spearman: spearman(&std, &sigma)?,
        high_noise_sigma: sigma[hi],
        high_noise_std: hi_std,
        low_noise_sigma: sigma[lo],
        low_noise_std: lo_std,
    })
}
