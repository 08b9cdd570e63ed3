//! Skip-gram with negative sampling over SMILES token sequences.

use crate::nn::Prng;

use super::{EmbeddingMatrix, FeatureError, TokenSequence, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkipGramConfig {
    pub dim: usize,
    /// Maximum context distance; each center draws an effective window in `1..=window`.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate, decayed linearly to `lr × 1e-4` over training.
    pub lr: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        Self {
            dim: 300,
            window: 5,
            negatives: 5,
            epochs: 15,
            lr: 0.025,
            seed: 1,
        }
    }
}

/// Cumulative unigram^0.75 distribution for drawing negatives.
struct NegativeTable {
    cumulative: Vec<f64>,
}

impl NegativeTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample(&self, prng: &mut Prng) -> u32 {
        let total = *self.cumulative.last().expect("non-empty table");
        let u = prng.uniform() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1) as u32
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Trains token embeddings on `corpus` (already encoded with `vocab`).
///
/// Input vectors start uniform in `±0.5/dim`, output vectors at zero; the
/// returned row for each token is the sum of its input and output vectors.
/// The unknown-token row is never trained and is returned as zeros. Training is
/// single-threaded and fully determined by `config.seed`.
pub fn train_skipgram(
    corpus: &[TokenSequence],
    vocab: &Vocabulary,
    config: &SkipGramConfig,
) -> Result<EmbeddingMatrix, FeatureError> {
    let total_tokens: usize = corpus.iter().map(|s| s.0.len()).sum();
    if total_tokens == 0 {
        return Err(FeatureError::EmptyCorpus);
    }
    let dim = config.dim;
    let v = vocab.len();
    let mut prng = Prng::new(config.seed);

    let mut counts = vec![0u64; v];
    for seq in corpus {
        for &t in &seq.0 {
            counts[t as usize] += 1;
        }
    }
    let table = NegativeTable::new(&counts);

    let mut input: Vec<f64> = (0..v * dim)
        .map(|_| (prng.uniform() - 0.5) / dim as f64)
        .collect();
    let mut output = vec![0.0f64; v * dim];
    let mut grad_in = vec![0.0f64; dim];

    let schedule = (config.epochs * total_tokens).max(1) as f64;
    let mut processed = 0usize;
    for _ in 0..config.epochs {
        for seq in corpus {
            let words = &seq.0;
            for (pos, &center) in words.iter().enumerate() {
                let lr = (config.lr * (1.0 - processed as f64 / schedule)).max(config.lr * 1e-4);
                processed += 1;
                let reach = 1 + prng.below(config.window.max(1));
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(words.len() - 1);
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = words[ctx_pos];
                    let c_off = center as usize * dim;
                    grad_in.iter_mut().for_each(|g| *g = 0.0);
                    for d in 0..=config.negatives {
                        let (target, label) = if d == 0 {
                            (context, 1.0)
                        } else {
                            let neg = table.sample(&mut prng);
                            if neg == context {
                                continue;
                            }
                            (neg, 0.0)
                        };
                        let t_off = target as usize * dim;
                        let dot: f64 = input[c_off..c_off + dim]
                            .iter()
                            .zip(&output[t_off..t_off + dim])
                            .map(|(a, b)| a * b)
                            .sum();
                        let g = (label - sigmoid(dot)) * lr;
                        for k in 0..dim {
                            grad_in[k] += g * output[t_off + k];
                            output[t_off + k] += g * input[c_off + k];
                        }
                    }
                    for k in 0..dim {
                        input[c_off + k] += grad_in[k];
                    }
                }
            }
        }
    }

    // Word vectors are input + output (context) vectors.
    for (a, b) in input.iter_mut().zip(&output) {
        *a += b;
    }
    input[..dim].iter_mut().for_each(|x| *x = 0.0);
    EmbeddingMatrix::new(vocab.clone(), dim, input)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    fn repeated_corpus() -> (Vec<TokenSequence>, Vocabulary) {
        let sentence: Vec<String> = ["C", "C", "O"].iter().map(|s| s.to_string()).collect();
        let sentinel = vec!["X".to_string()];
        let mut raw = vec![sentence; 1000];
        raw.push(sentinel);
        let vocab = Vocabulary::from_corpus(raw.iter().map(Vec::as_slice));
        let corpus = raw.iter().map(|s| vocab.encode(s)).collect();
        (corpus, vocab)
    }

    #[test]
    fn co_occurring_tokens_end_up_closer() {
        let (corpus, vocab) = repeated_corpus();
        for seed in 1..=3 {
            let cfg = SkipGramConfig {
                seed,
                ..SkipGramConfig::default()
            };
            let emb = train_skipgram(&corpus, &vocab, &cfg).unwrap();
            assert_eq!(emb.dim(), 300);
            let c = emb.row(vocab.id("C").unwrap());
            let o = emb.row(vocab.id("O").unwrap());
            let x = emb.row(vocab.id("X").unwrap());
            let (co, cx) = (cosine(c, o), cosine(c, x));
            assert!(co > cx, "seed {seed}: {co} vs {cx}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (corpus, vocab) = repeated_corpus();
        let cfg = SkipGramConfig {
            dim: 16,
            epochs: 2,
            ..SkipGramConfig::default()
        };
        let a = train_skipgram(&corpus, &vocab, &cfg).unwrap();
        let b = train_skipgram(&corpus, &vocab, &cfg).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
        let c = train_skipgram(&corpus, &vocab, &SkipGramConfig { seed: 2, ..cfg }).unwrap();
        assert_ne!(a.to_bytes(), c.to_bytes());
    }

    #[test]
    fn empty_corpus() {
        let vocab = Vocabulary::from_tokens(vec![]);
        assert!(matches!(
            train_skipgram(&[], &vocab, &SkipGramConfig::default()),
            Err(FeatureError::EmptyCorpus)
        ));
        assert!(matches!(
            train_skipgram(&[TokenSequence(vec![])], &vocab, &SkipGramConfig::default()),
            Err(FeatureError::EmptyCorpus)
        ));
    }

    #[test]
    fn unknown_row_is_zero_and_rows_finite() {
        let (corpus, vocab) = repeated_corpus();
        let cfg = SkipGramConfig {
            dim: 8,
            epochs: 1,
            ..SkipGramConfig::default()
        };
        let emb = train_skipgram(&corpus, &vocab, &cfg).unwrap();
        assert!(emb.row(0).iter().all(|v| *v == 0.0));
        assert!(emb.values().iter().all(|v| v.is_finite()));
    }
}
