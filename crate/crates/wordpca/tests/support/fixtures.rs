//! Synthetic embeddings with known structure.
//!
//! Coordinates are axis-aligned with strictly decreasing variances so the
//! principal components coincide with the axes, which makes the location
//! of planted signal known in component space.

#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordpca::core::{cosine, EmbeddingSet, SimilarityDataset, SimilarityPair};
use wordpca::datasets::{LabeledRecord, LabeledTextDataset, Split};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform noise with standard deviation `sd`.
fn noise(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    rng.random_range(-1.0..1.0) * sd * 3f64.sqrt()
}

pub struct Planted {
    pub embeddings: EmbeddingSet,
    pub dataset: LabeledTextDataset,
}

/// Class-balanced records: sentences of `len` words drawn with replacement
/// from the vocabulary of their class, classes interleaved.
pub fn sentences(
    name: &str,
    vocab: &[Vec<String>],
    len: usize,
    train_per_class: usize,
    test_per_class: usize,
    rng: &mut ChaCha8Rng,
) -> LabeledTextDataset {
    let mut records = Vec::new();
    for (split, n) in [(Split::Train, train_per_class), (Split::Test, test_per_class)] {
        for _ in 0..n {
            for (c, words) in vocab.iter().enumerate() {
                let tokens = (0..len).map(|_| words.choose(rng).unwrap().clone()).collect();
                records.push(LabeledRecord { split, label: format!("c{c}"), tokens });
            }
        }
    }
    LabeledTextDataset { name: name.to_owned(), records }
}

/// `words_per_class` words per class; coordinate `j` of a word is
/// `signal(class, j)` plus uniform noise of standard deviation `sd[j]`.
fn class_embeddings(
    classes: usize,
    words_per_class: usize,
    sd: &[f64],
    signal: impl Fn(usize, usize) -> f64,
    rng: &mut ChaCha8Rng,
) -> (EmbeddingSet, Vec<Vec<String>>) {
    let d = sd.len();
    let mut words = Vec::new();
    let mut data = Vec::new();
    let mut vocab = vec![Vec::new(); classes];
    for (c, class_words) in vocab.iter_mut().enumerate() {
        for w in 0..words_per_class {
            let token = format!("c{c}w{w}");
            for (j, &s) in sd.iter().enumerate() {
                data.push(signal(c, j) + noise(rng, s));
            }
            words.push(token.clone().into_bytes());
            class_words.push(token);
        }
    }
    (EmbeddingSet::from_f64_rows(words, d, &data).unwrap(), vocab)
}

/// Sign pattern of class `c` on two axes: the four quadrants.
fn quadrant(c: usize, axis: usize) -> f64 {
    if (c >> axis) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// 20 dimensions, 4 classes. Components 0, 1 and 4 carry noise; the class
/// lives on components 2 and 3. Everything past component 4 is weaker noise.
pub fn planted_sweep() -> Planted {
    let mut rng = rng(5);
    let sd: Vec<f64> = (0..20)
        .map(|j| match j {
            0 => 4.0,
            1 => 3.5,
            2 | 3 => 0.2,
            4 => 1.5,
            _ => 0.85f64.powi(j - 5),
        })
        .collect();
    let (embeddings, vocab) =
        class_embeddings(4, 30, &sd, |c, j| if j == 2 || j == 3 { 2.0 * quadrant(c, j - 2) } else { 0.0 }, &mut rng);
    let dataset = sentences("planted_sweep", &vocab, 3, 100, 100, &mut rng);
    Planted { embeddings, dataset }
}

/// 30 dimensions, 4 classes. Top band: strong noise. Middle band: the class
/// signal on its first two components, noise on the rest. Bottom band: faint
/// noise.
pub fn planted_band() -> Planted {
    let mut rng = rng(6);
    let sd: Vec<f64> = (0..30)
        .map(|j| match j {
            0..10 => 6.0 - 0.3 * j as f64,
            10 | 11 => 0.3,
            12..20 => 0.9 - 0.05 * (j - 12) as f64,
            _ => 0.05,
        })
        .collect();
    let (embeddings, vocab) =
        class_embeddings(4, 30, &sd, |c, j| if j == 10 || j == 11 { quadrant(c, j - 10) } else { 0.0 }, &mut rng);
    let dataset = sentences("planted_band", &vocab, 3, 100, 100, &mut rng);
    Planted { embeddings, dataset }
}

/// Sylvester Hadamard matrix of order 16.
fn hadamard16(i: usize, j: usize) -> f64 {
    if (i & j).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub const PROBE_SIGNAL_COMPONENT: usize = 7;
pub const PROBE_CLASSES: usize = 8;

/// 12 dimensions, 8 classes of 16 words. Axis `j` has variance `2^-j`.
/// Every axis except the planted one carries the same 16 values in every
/// class (distinct Hadamard columns), so it is exactly uncorrelated with the
/// class and with the other axes; the planted axis is a class-wise constant.
/// The covariance is therefore exactly diagonal and component `i` is axis
/// `i`.
pub fn planted_probe() -> Planted {
    let d = 12;
    let n = PROBE_CLASSES * 16;
    // planted axis variance matches 2^-7 under the same N - 1 divisor
    let level_sq_sum: f64 = (0..PROBE_CLASSES).map(|c| (c as f64 - 3.5).powi(2)).sum::<f64>() * 16.0;
    let s = (2f64.powi(-(PROBE_SIGNAL_COMPONENT as i32)) * n as f64 / level_sq_sum).sqrt();
    let mut words = Vec::new();
    let mut data = Vec::new();
    let mut vocab = vec![Vec::new(); PROBE_CLASSES];
    for (c, class_words) in vocab.iter_mut().enumerate() {
        for w in 0..16 {
            let token = format!("c{c}w{w}");
            for j in 0..d {
                let sd = 2f64.powi(-(j as i32)).sqrt();
                data.push(if j == PROBE_SIGNAL_COMPONENT { (c as f64 - 3.5) * s } else { hadamard16(w, j + 1) * sd });
            }
            words.push(token.clone().into_bytes());
            class_words.push(token);
        }
    }
    let embeddings = EmbeddingSet::from_f64_rows(words, d, &data).unwrap();
    let dataset = sentences("planted_probe", &vocab, 5, 100, 500, &mut rng(7));
    Planted { embeddings, dataset }
}

/// Word vectors dominated by one shared direction of varying strength;
/// human scores are the cosines of the remaining coordinates.
pub fn shared_direction_similarity() -> (EmbeddingSet, SimilarityDataset) {
    let mut rng = rng(8);
    let (n, d) = (60, 10);
    let mut semantic = Vec::new();
    let mut data = Vec::new();
    for _ in 0..n {
        let s: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        data.push(10.0 + 6.0 * rng.random_range(-1.0..1.0));
        data.extend_from_slice(&s);
        semantic.push(s);
    }
    let words = (0..n).map(|i| format!("v{i}").into_bytes()).collect();
    let embeddings = EmbeddingSet::from_f64_rows(words, d, &data).unwrap();
    let mut pairs = Vec::new();
    while pairs.len() < 80 {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            let score = cosine(&semantic[a], &semantic[b]).unwrap();
            pairs.push(SimilarityPair { a: format!("v{a}"), b: format!("v{b}"), score });
        }
    }
    (embeddings, SimilarityDataset::new("shared_direction", pairs).unwrap())
}

/// A small similarity set over the words of an embedding set.
pub fn similarity_over(e: &EmbeddingSet, pairs: usize, seed: u64) -> SimilarityDataset {
    let mut rng = rng(seed);
    let out = (0..pairs)
        .map(|_| {
            let (a, b) = (rng.random_range(0..e.len()), rng.random_range(0..e.len()));
            SimilarityPair {
                a: String::from_utf8(e.word(a).to_vec()).unwrap(),
                b: String::from_utf8(e.word(b).to_vec()).unwrap(),
                score: rng.random_range(0.0..10.0),
            }
        })
        .collect();
    SimilarityDataset::new("random_pairs", out).unwrap()
}

pub fn labeled_tsv(ds: &LabeledTextDataset) -> String {
    ds.records.iter().map(|r| format!("{}\t{}\t{}\n", r.split, r.label, r.tokens.join(" "))).collect()
}

pub fn similarity_tsv(ds: &SimilarityDataset) -> String {
    ds.pairs().iter().map(|p| format!("{}\t{}\t{}\n", p.a, p.b, p.score)).collect()
}
