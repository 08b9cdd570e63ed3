//! Token embedding table and its file format.
//!
//! ```text
//! magic    4 bytes "PQEM"
//! version  u16     1
//! dim      u32
//! count    u32     vocabulary size, including the unknown token at id 0
//! tokens   count × (u16 length + UTF-8)
//! rows     count × dim f64, row-major
//! ```

use crate::codec::{Reader, Writer};

use super::{FeatureError, TokenSequence, Vocabulary};

const MAGIC: &[u8; 4] = b"PQEM";
const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    vocab: Vocabulary,
    dim: usize,
    values: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(vocab: Vocabulary, dim: usize, values: Vec<f64>) -> Result<Self, FeatureError> {
        if values.len() != vocab.len() * dim {
            return Err(FeatureError::DimensionMismatch {
                expected: vocab.len() * dim,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FeatureError::NonFinite("embedding matrix"));
        }
        Ok(Self { vocab, dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row for token id; out-of-range ids fall back to the unknown row.
    pub fn row(&self, id: u32) -> &[f64] {
        let id = if (id as usize) < self.vocab.len() { id as usize } else { 0 };
        &self.values[id * self.dim..(id + 1) * self.dim]
    }

    /// Mean of the token vectors of `seq`.
    pub fn embed(&self, seq: &TokenSequence) -> Result<Vec<f64>, FeatureError> {
        if seq.0.is_empty() {
            return Err(FeatureError::EmptySequence);
        }
        let mut acc = vec![0.0; self.dim];
        for &t in &seq.0 {
            for (a, v) in acc.iter_mut().zip(self.row(t)) {
                *a += v;
            }
        }
        let n = seq.0.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Ok(acc)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(MAGIC)
            .u16(VERSION)
            .u32(self.dim as u32)
            .u32(self.vocab.len() as u32);
        for t in self.vocab.tokens() {
            w.str(t);
        }
        w.f64s(&self.values);
        w.into_bytes()
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, FeatureError> {
        let corrupt = |what: &str| FeatureError::Corrupt(what.to_owned());
        let mut r = Reader::new(data);
        if r.take(4).map_err(|_| corrupt("truncated header"))? != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let version = r.u16().map_err(|_| corrupt("truncated header"))?;
        if version != VERSION {
            return Err(FeatureError::Corrupt(format!("unsupported version {version}")));
        }
        let dim = r.u32().map_err(|_| corrupt("truncated header"))? as usize;
        let count = r.u32().map_err(|_| corrupt("truncated header"))? as usize;
        let mut tokens = Vec::with_capacity(count.min(1 << 16));
        for _ in 0..count {
            tokens.push(r.str().map_err(|_| corrupt("truncated vocabulary"))?);
        }
        if tokens.first().map(String::as_str) != Some(super::tokenize::UNK) {
            return Err(corrupt("first token is not the unknown token"));
        }
        let vocab = Vocabulary::from_tokens(tokens.split_off(1));
        if vocab.len() != count {
            return Err(corrupt("duplicate tokens in vocabulary"));
        }
        let values = r
            .f64s(count * dim)
            .map_err(|_| corrupt("truncated rows"))?;
        if r.remaining() != 0 {
            return Err(corrupt("trailing bytes"));
        }
        Self::new(vocab, dim, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> EmbeddingMatrix {
        let vocab = Vocabulary::from_tokens(vec!["C".into(), "O".into()]);
        let mut values = vec![0.0; 3 * 4];
        values[4] = 1.0; // C = e0
        values[9] = 1.0; // O = e1
        EmbeddingMatrix::new(vocab, 4, values).unwrap()
    }

    #[test]
    fn mean_pooling() {
        let emb = toy();
        let c = emb.vocab().id("C").unwrap();
        let o = emb.vocab().id("O").unwrap();
        assert_eq!(emb.embed(&TokenSequence(vec![c])).unwrap(), emb.row(c));
        assert_eq!(emb.embed(&TokenSequence(vec![c, c])).unwrap(), emb.row(c));
        assert_eq!(
            emb.embed(&TokenSequence(vec![c, o])).unwrap(),
            vec![0.5, 0.5, 0.0, 0.0]
        );
        assert!(matches!(
            emb.embed(&TokenSequence(vec![])),
            Err(FeatureError::EmptySequence)
        ));
    }

    #[test]
    fn file_round_trip_and_corruption() {
        let emb = toy();
        let bytes = emb.to_bytes();
        assert_eq!(&bytes[..4], b"PQEM");
        assert_eq!(EmbeddingMatrix::from_bytes(&bytes).unwrap(), emb);
        assert!(EmbeddingMatrix::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes;
        bad[1] = b'?';
        assert!(EmbeddingMatrix::from_bytes(&bad).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let vocab = Vocabulary::from_tokens(vec![]);
        assert!(EmbeddingMatrix::new(vocab, 1, vec![f64::NAN]).is_err());
    }
}
