//! The in-memory embedding matrix and its vocabulary.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Vocabulary plus an `N × d` matrix of `f32` word vectors.
///
/// Tokens are opaque byte strings. Construction validates every invariant, so
/// a value of this type always has `N ≥ 1`, `d ≥ 1`, unique tokens and finite
/// entries. The set is immutable once built.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    words: Vec<Vec<u8>>,
    dim: usize,
    data: Vec<f32>,
    index: BTreeMap<Vec<u8>, usize>,
}

impl EmbeddingSet {
    /// `data` holds the rows back to back, `words.len() * dim` entries.
    pub fn new(words: Vec<Vec<u8>>, dim: usize, data: Vec<f32>) -> Result<Self> {
        if words.is_empty() || dim == 0 {
            return Err(Error::EmptyEmbeddings);
        }
        if data.len() != words.len() * dim {
            return Err(Error::DimensionMismatch { expected: words.len() * dim, found: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row: pos / dim, col: pos % dim });
        }
        let mut index = BTreeMap::new();
        for (row, word) in words.iter().enumerate() {
            if index.insert(word.clone(), row).is_some() {
                return Err(Error::DuplicateToken { row });
            }
        }
        Ok(EmbeddingSet { words, dim, data, index })
    }

    /// Builds a set from `f64` rows, rounding each entry to `f32`.
    pub fn from_f64_rows(words: Vec<Vec<u8>>, dim: usize, rows: &[f64]) -> Result<Self> {
        Self::new(words, dim, rows.iter().map(|&v| v as f32).collect())
    }

    /// Same vocabulary, new matrix. Skips the duplicate check.
    pub(crate) fn with_matrix(&self, dim: usize, rows: &[f64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyEmbeddings);
        }
        debug_assert_eq!(rows.len(), self.len() * dim);
        let data: Vec<f32> = rows.iter().map(|&v| v as f32).collect();
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row: pos / dim, col: pos % dim });
        }
        Ok(EmbeddingSet { words: self.words.clone(), dim, data, index: self.index.clone() })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Always false; kept for API symmetry with collections.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn word(&self, row: usize) -> &[u8] {
        &self.words[row]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn index_of(&self, token: &[u8]) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Exact-match lookup; case handling is left to the caller.
    pub fn lookup(&self, token: &[u8]) -> Option<&[f32]> {
        self.index_of(token).map(|i| self.row(i))
    }

    /// Rows converted to `f64`, back to back.
    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| f64::from(v)).collect()
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f32) -> Result<Self> {
        let data = self.data.iter().map(|&v| v * factor).collect::<Vec<_>>();
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row: pos / self.dim, col: pos % self.dim });
        }
        Ok(EmbeddingSet { words: self.words.clone(), dim: self.dim, data, index: self.index.clone() })
    }
}

impl PartialEq for EmbeddingSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.words == other.words
            && self.data.len() == other.data.len()
            && self.data.iter().zip(&other.data).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
