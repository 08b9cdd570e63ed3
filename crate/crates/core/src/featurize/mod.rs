//! Molecule descriptors: a folded circular fingerprint concatenated with a
//! mean-pooled SMILES token embedding.

mod embedding;
mod morgan;
mod skipgram;
mod standardize;
mod tokenize;

pub use embedding::EmbeddingMatrix;
pub use morgan::{
    atom_initial_invariant, fnv1a64, morgan_environments, morgan_fingerprint, BitFingerprint,
    Environment, FingerprintConfig,
};
pub use skipgram::{train_skipgram, SkipGramConfig};
pub use standardize::{ColumnStandardizer, ScalarStandardizer};
pub use tokenize::{detokenize, tokenize_smiles, TokenSequence, Vocabulary, UNK};

use crate::chem::{parse_smiles, ParseError};

pub const FINGERPRINT_BITS: usize = 512;
pub const EMBEDDING_DIM: usize = 300;
pub const FEATURE_DIM: usize = FINGERPRINT_BITS + EMBEDDING_DIM;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("molecule has no atoms")]
    EmptyMolecule,
    #[error("token sequence is empty")]
    EmptySequence,
    #[error("embedding corpus is empty")]
    EmptyCorpus,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("corrupt embedding file: {0}")]
    Corrupt(String),
}

/// Fingerprint bits (as 0/1) followed by embedding values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    fingerprint_len: usize,
}

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn fingerprint_part(&self) -> &[f64] {
        &self.values[..self.fingerprint_len]
    }

    pub fn embedding_part(&self) -> &[f64] {
        &self.values[self.fingerprint_len..]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Concatenates a `FINGERPRINT_BITS` fingerprint with an `EMBEDDING_DIM` embedding.
pub fn concat_features(fp: &BitFingerprint, emb: &[f64]) -> Result<FeatureVector, FeatureError> {
    concat_features_with(fp, emb, FINGERPRINT_BITS, EMBEDDING_DIM)
}

pub fn concat_features_with(
    fp: &BitFingerprint,
    emb: &[f64],
    bits: usize,
    dim: usize,
) -> Result<FeatureVector, FeatureError> {
    if fp.len() != bits {
        return Err(FeatureError::DimensionMismatch {
            expected: bits,
            got: fp.len(),
        });
    }
    if emb.len() != dim {
        return Err(FeatureError::DimensionMismatch {
            expected: dim,
            got: emb.len(),
        });
    }
    if emb.iter().any(|v| !v.is_finite()) {
        return Err(FeatureError::NonFinite("embedding"));
    }
    let mut values = Vec::with_capacity(bits + dim);
    values.extend(fp.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }));
    values.extend_from_slice(emb);
    Ok(FeatureVector {
        values,
        fingerprint_len: bits,
    })
}

/// Fingerprint settings plus an embedding table trained on a set of SMILES.
#[derive(Debug, Clone, PartialEq)]
pub struct Featurizer {
    pub fingerprint: FingerprintConfig,
    pub embedding: EmbeddingMatrix,
}

impl Featurizer {
    /// Trains the token embedding on `smiles` (the training split only).
    pub fn fit<S: AsRef<str>>(
        smiles: &[S],
        fingerprint: FingerprintConfig,
        skipgram: &SkipGramConfig,
    ) -> Result<Self, FeatureError> {
        fingerprint.validate()?;
        let tokenized = smiles
            .iter()
            .map(|s| tokenize_smiles(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let vocab = Vocabulary::from_corpus(tokenized.iter().map(Vec::as_slice));
        let corpus: Vec<TokenSequence> = tokenized.iter().map(|t| vocab.encode(t)).collect();
        let embedding = train_skipgram(&corpus, &vocab, skipgram)?;
        Ok(Self {
            fingerprint,
            embedding,
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.fingerprint.length + self.embedding.dim()
    }

    /// Raw (unstandardized) descriptor of one SMILES string.
    pub fn features(&self, smiles: &str) -> Result<FeatureVector, FeatureError> {
        let mol = parse_smiles(smiles)?;
        let fp = morgan_fingerprint(&mol, &self.fingerprint)?;
        let tokens = tokenize::split_tokens(smiles);
        let seq = self.embedding.vocab().encode(&tokens);
        let emb = self.embedding.embed(&seq)?;
        concat_features_with(&fp, &emb, self.fingerprint.length, self.embedding.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_layout() {
        let fp = BitFingerprint::from_bits(vec![true; 512]);
        let f = concat_features(&fp, &[0.0; 300]).unwrap();
        assert_eq!(f.len(), 812);
        assert!(f.fingerprint_part().iter().all(|v| *v == 1.0));
        assert!(f.embedding_part().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn concat_mismatch() {
        let fp = BitFingerprint::zeros(256);
        assert!(matches!(
            concat_features(&fp, &[0.0; 300]),
            Err(FeatureError::DimensionMismatch { expected: 512, got: 256 })
        ));
        let fp = BitFingerprint::zeros(512);
        assert!(matches!(
            concat_features(&fp, &[0.0; 299]),
            Err(FeatureError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn featurizer_end_to_end() {
        let smiles = ["CCO", "c1ccccc1O", "CC(=O)Nc1ccc(O)cc1", "NC1CC1c1ccccc1"];
        let sg = SkipGramConfig {
            epochs: 2,
            ..SkipGramConfig::default()
        };
        let f = Featurizer::fit(&smiles, FingerprintConfig::default(), &sg).unwrap();
        let v = f.features("CCN").unwrap();
        assert_eq!(v.len(), FEATURE_DIM);
        assert!(v.fingerprint_part().iter().all(|b| *b == 0.0 || *b == 1.0));
        assert!(v.fingerprint_part().iter().sum::<f64>() >= 1.0);
        assert!(f.features("C(").is_err());
    }
}
