//! Reference implementations used only by tests. None of these share code
//! with the library paths they check.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordpca_core::EmbeddingSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n × d` set with entries uniform in `[-1, 1)`, column `j` scaled by
/// `1 + j / 2` so the spectrum is spread out. Words are `w0`, `w1`, ...
pub fn random_set(rng: &mut ChaCha8Rng, n: usize, d: usize) -> EmbeddingSet {
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        for j in 0..d {
            let v: f32 = rng.random_range(-1.0..1.0);
            data.push(v * (1.0 + j as f32 / 2.0));
        }
    }
    let words = (0..n).map(|i| format!("w{i}").into_bytes()).collect();
    EmbeddingSet::new(words, d, data).unwrap()
}

pub struct PcaOracle {
    pub mean: Vec<f64>,
    pub variances: Vec<f64>,
    pub components: Vec<Vec<f64>>,
}

/// Dense covariance `Xcᵀ Xc / (N − 1)` eigendecomposed by nalgebra, sorted by
/// descending eigenvalue, each vector flipped so its largest-magnitude entry
/// is positive.
pub fn pca_oracle(x: &EmbeddingSet) -> PcaOracle {
    let (n, d) = (x.len(), x.dim());
    let m = DMatrix::from_fn(n, d, |i, j| f64::from(x.row(i)[j]));
    let mean: Vec<f64> = (0..d).map(|j| m.column(j).iter().sum::<f64>() / n as f64).collect();
    let centered = DMatrix::from_fn(n, d, |i, j| m[(i, j)] - mean[j]);
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let variances = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let components = order
        .iter()
        .map(|&k| {
            let mut u: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let mut best = 0;
            for i in 1..d {
                if u[i].abs() > u[best].abs() {
                    best = i;
                }
            }
            if u[best] < 0.0 {
                u.iter_mut().for_each(|v| *v = -*v);
            }
            u
        })
        .collect();
    PcaOracle { mean, variances, components }
}

/// Sequential Gram-Schmidt style removal: after each direction the running
/// vector is updated before the next coefficient is taken.
pub fn sequential_removal(v: &[f64], directions: &[&[f64]]) -> Vec<f64> {
    let mut r = v.to_vec();
    for u in directions {
        let c: f64 = r.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
        for (ri, ui) in r.iter_mut().zip(u.iter()) {
            *ri -= c * ui;
        }
    }
    r
}

/// O(n²) fractional ranking: 1 + #smaller + (#equal − 1) / 2.
pub fn brute_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|x| {
            let smaller = xs.iter().filter(|y| *y < x).count() as f64;
            let equal = xs.iter().filter(|y| *y == x).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn brute_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub fn brute_spearman(xs: &[f64], ys: &[f64]) -> f64 {
    brute_pearson(&brute_ranks(xs), &brute_ranks(ys))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
