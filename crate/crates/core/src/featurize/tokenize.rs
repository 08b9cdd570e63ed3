use std::collections::HashMap;

use crate::chem::{parse_smiles, ParseError};

/// Splits a SMILES string into word-level tokens by greedy longest match:
/// a bracket atom `[...]` is one token, as are `Cl`, `Br` and `%nn` ring
/// labels; everything else is one character.
///
/// The input is validated by the parser first, so only well-formed SMILES
/// are tokenized. Concatenating the tokens gives back the input.
pub fn tokenize_smiles(input: &str) -> Result<Vec<String>, ParseError> {
    parse_smiles(input)?;
    Ok(split_tokens(input))
}

pub(crate) fn split_tokens(input: &str) -> Vec<String> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let len = match bytes[i] {
            b'[' => bytes[i..]
                .iter()
                .position(|&b| b == b']')
                .map_or(bytes.len() - i, |p| p + 1),
            b'%' => 3.min(bytes.len() - i),
            b'C' if bytes.get(i + 1) == Some(&b'l') => 2,
            b'B' if bytes.get(i + 1) == Some(&b'r') => 2,
            _ => 1,
        };
        tokens.push(input[i..i + len].to_owned());
        i += len;
    }
    tokens
}

pub fn detokenize(tokens: &[String]) -> String {
    tokens.concat()
}

pub const UNK: &str = "<unk>";

/// Token ↔ id map. Id 0 is always the unknown-token row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

/// Token ids of one SMILES string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence(pub Vec<u32>);

impl Vocabulary {
    /// Builds a vocabulary in first-occurrence order (min count 1).
    pub fn from_corpus<'a, I>(corpus: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut v = Self::from_tokens(Vec::new());
        for seq in corpus {
            for t in seq {
                v.push(t);
            }
        }
        v
    }

    /// Rebuilds a vocabulary from its token list; the unknown token is
    /// prepended when missing.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        let mut v = Self {
            tokens: Vec::new(),
            index: HashMap::new(),
        };
        v.push(UNK);
        for t in &tokens {
            v.push(t);
        }
        v
    }

    fn push(&mut self, t: &str) {
        if !self.index.contains_key(t) {
            self.index.insert(t.to_owned(), self.tokens.len() as u32);
            self.tokens.push(t.to_owned());
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= 1
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Unknown tokens map to id 0.
    pub fn encode(&self, tokens: &[String]) -> TokenSequence {
        TokenSequence(tokens.iter().map(|t| self.id(t).unwrap_or(0)).collect())
    }

    pub fn decode(&self, seq: &TokenSequence) -> Vec<String> {
        seq.0
            .iter()
            .map(|&i| self.token(i).unwrap_or(UNK).to_owned())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize_smiles(s).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(toks("CCO"), vec!["C", "C", "O"]);
        assert_eq!(toks("CCl"), vec!["C", "Cl"]);
        assert_eq!(toks("C[NH4+]C"), vec!["C", "[NH4+]", "C"]);
        assert_eq!(toks("C%10CC%10Br"), vec!["C", "%10", "C", "C", "%10", "Br"]);
        assert_eq!(toks("c1ccccc1"), vec!["c", "1", "c", "c", "c", "c", "c", "1"]);
    }

    #[test]
    fn invalid_smiles_is_rejected() {
        assert!(tokenize_smiles("C(").is_err());
    }

    #[test]
    fn vocabulary_ids() {
        let corpus = [toks("CCO"), toks("CCl")];
        let v = Vocabulary::from_corpus(corpus.iter().map(Vec::as_slice));
        assert_eq!(v.tokens(), &["<unk>", "C", "O", "Cl"]);
        let seq = v.encode(&toks("ClCN"));
        assert_eq!(seq, TokenSequence(vec![3, 1, 0]));
        assert_eq!(v.decode(&v.encode(&toks("CCO"))), toks("CCO"));
    }

    proptest! {
        #[test]
        fn split_then_join_is_identity(s in "[CNOcnos()=#1-9%\\[\\]HBrl+-]{0,30}") {
            prop_assert_eq!(detokenize(&split_tokens(&s)), s);
        }
    }
}
