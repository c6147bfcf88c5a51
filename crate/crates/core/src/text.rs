//! Sentence composition, cosine similarity, Spearman's rho and word
//! similarity evaluation.

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

use crate::embedding::EmbeddingSet;
use crate::{Error, Result};

/// Row of `token` in `e`: exact match first, then the lowercased token.
pub fn resolve(e: &EmbeddingSet, token: &[u8]) -> Option<usize> {
    e.index_of(token).or_else(|| {
        let lower = lowercase(token);
        match lower {
            Cow::Borrowed(_) => None,
            Cow::Owned(ref l) => e.index_of(l),
        }
    })
}

fn lowercase(token: &[u8]) -> Cow<'_, [u8]> {
    match core::str::from_utf8(token) {
        Ok(s) => {
            let l = s.to_lowercase();
            if l == s {
                Cow::Borrowed(token)
            } else {
                Cow::Owned(l.into_bytes())
            }
        }
        Err(_) if token.iter().any(u8::is_ascii_uppercase) => Cow::Owned(token.to_ascii_lowercase()),
        Err(_) => Cow::Borrowed(token),
    }
}

/// Mean of the resolvable token vectors; the zero vector when none resolve.
pub fn compose_sentence<T: AsRef<[u8]>>(tokens: &[T], e: &EmbeddingSet) -> Vec<f64> {
    let rows: Vec<usize> = tokens.iter().filter_map(|t| resolve(e, t.as_ref())).collect();
    mean_of_rows(e, &rows)
}

/// Mean of the given rows of `e`, accumulated in the given order.
pub fn mean_of_rows(e: &EmbeddingSet, rows: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; e.dim()];
    if rows.is_empty() {
        return acc;
    }
    for &r in rows {
        for (a, &v) in acc.iter_mut().zip(e.row(r)) {
            *a += f64::from(v);
        }
    }
    let n = rows.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    acc
}

const NORM_FLOOR: f64 = 1e-12;

/// Cosine similarity; 0 when either vector has norm below `1e-12`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    let (nu, nv) = (sqrt(uu), sqrt(vv));
    if nu < NORM_FLOOR || nv < NORM_FLOOR {
        return Ok(0.0);
    }
    Ok((uv / (nu * nv)).clamp(-1.0, 1.0))
}

/// [`cosine`] over `f32` vectors, accumulated in `f64`. Lengths must match.
pub fn cosine_f32(u: &[f32], v: &[f32]) -> f64 {
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (f64::from(a), f64::from(b));
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    let (nu, nv) = (sqrt(uu), sqrt(vv));
    if nu < NORM_FLOOR || nv < NORM_FLOOR {
        return 0.0;
    }
    (uv / (nu * nv)).clamp(-1.0, 1.0)
}

/// 1-based fractional ranks; tied values share the mean of their rank span.
pub fn fractional_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of fractional ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewRecords { needed: 2, found: xs.len() });
    }
    pearson(&fractional_ranks(xs), &fractional_ranks(ys))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityPair {
    pub a: String,
    pub b: String,
    pub score: f64,
}

/// Word pairs with human similarity ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityDataset {
    name: String,
    pairs: Vec<SimilarityPair>,
}

impl SimilarityDataset {
    pub fn new(name: impl Into<String>, pairs: Vec<SimilarityPair>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::TooFewRecords { needed: 2, found: pairs.len() });
        }
        if let Some(row) = pairs.iter().position(|p| !p.score.is_finite()) {
            return Err(Error::NonFiniteValue { row, col: 2 });
        }
        Ok(SimilarityDataset { name: name.into(), pairs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pairs(&self) -> &[SimilarityPair] {
        &self.pairs
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityResult {
    pub rho: f64,
    pub evaluated_pairs: usize,
    pub skipped_pairs: usize,
}

/// Spearman correlation between embedding cosines and human scores over the
/// pairs whose tokens both resolve.
pub fn eval_word_similarity(dataset: &SimilarityDataset, e: &EmbeddingSet) -> Result<SimilarityResult> {
    let mut model = Vec::with_capacity(dataset.pairs.len());
    let mut human = Vec::with_capacity(dataset.pairs.len());
    for p in &dataset.pairs {
        let (Some(a), Some(b)) = (resolve(e, p.a.as_bytes()), resolve(e, p.b.as_bytes())) else {
            continue;
        };
        model.push(cosine_f32(e.row(a), e.row(b)));
        human.push(p.score);
    }
    let evaluated = model.len();
    if evaluated < 2 {
        return Err(Error::TooFewEvaluablePairs { evaluated });
    }
    Ok(SimilarityResult {
        rho: spearman(&model, &human)?,
        evaluated_pairs: evaluated,
        skipped_pairs: dataset.pairs.len() - evaluated,
    })
}
