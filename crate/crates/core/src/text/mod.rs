//! Word-level text samples, embedding tables and the two embedding-space
//! scorers (lexicon centroids for politeness, circumplex projection for
//! emotion).

use std::collections::HashMap;

use crate::error::{FixError, Result};
use crate::mask::FeatureMask;

pub mod emotion;
pub mod politeness;

pub use emotion::{AnchorWords, CircumplexAxes, EmotionScorer};
pub use politeness::{Centroids, Lexicon, PolitenessScorer};

/// A whitespace-tokenized text. Punctuation stays attached to the word it
/// follows so phrase and sentence boundaries survive tokenization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizedText {
    language: String,
    words: Vec<String>,
}

impl TokenizedText {
    pub fn new(language: impl Into<String>, words: Vec<String>) -> Self {
        Self {
            language: language.into(),
            words,
        }
    }

    /// Splits on whitespace; tokens without any alphanumeric character are
    /// glued onto the preceding word (or dropped at the start of the text).
    pub fn from_raw(language: impl Into<String>, raw: &str) -> Self {
        let mut words: Vec<String> = Vec::new();
        for token in raw.split_whitespace() {
            if token.chars().any(char::is_alphanumeric) {
                words.push(token.to_string());
            } else if let Some(last) = words.last_mut() {
                last.push_str(token);
            }
        }
        Self::new(language, words)
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Embedding lookup key of word `i`.
    pub fn key(&self, i: usize) -> String {
        normalize_key(&self.words[i])
    }

    /// Lookup keys of the words selected by `group`.
    pub fn selected_keys(&self, group: &FeatureMask) -> Result<Vec<String>> {
        if group.len() != self.words.len() {
            return Err(FixError::arg(format!(
                "mask length {} does not match word count {}",
                group.len(),
                self.words.len()
            )));
        }
        Ok(group.ones().map(|i| self.key(i)).collect())
    }
}

/// Lowercases and strips surrounding punctuation and whitespace.
pub fn normalize_key(word: &str) -> String {
    word.trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Precomputed word (or phrase) embeddings of one fixed dimension.
#[derive(Clone, Debug, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, word: &str, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(FixError::arg(format!(
                "embedding for `{word}` has dimension {}, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(FixError::arg(format!("embedding for `{word}` is not finite")));
        }
        self.vectors.insert(normalize_key(word), vector);
        Ok(())
    }

    pub fn get(&self, word: &str) -> Result<&[f64]> {
        self.vectors
            .get(&normalize_key(word))
            .map(Vec::as_slice)
            .ok_or_else(|| FixError::MissingEmbedding(word.to_string()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(&normalize_key(word))
    }

    /// Fails with the first word of `text` that has no embedding.
    pub fn check_covers(&self, text: &TokenizedText) -> Result<()> {
        for w in text.words() {
            self.get(w)?;
        }
        Ok(())
    }

    /// Component-wise mean of the embeddings of `words`.
    pub fn mean_of<S: AsRef<str>>(&self, words: &[S]) -> Result<Vec<f64>> {
        if words.is_empty() {
            return Err(FixError::arg("mean of an empty word list"));
        }
        let mut acc = vec![0.0; self.dim];
        for w in words {
            for (a, v) in acc.iter_mut().zip(self.get(w.as_ref())?) {
                *a += v;
            }
        }
        let n = words.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Ok(acc)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity; 0 if either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let denom = norm(a) * norm(b);
    if denom == 0.0 {
        0.0
    } else {
        dot(a, b) / denom
    }
}
