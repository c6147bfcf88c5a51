//! Experiment orchestration: dimension sweeps, variance-band splits, PPA
//! comparisons and per-component probing.
//!
//! Tokens are resolved against the vocabulary once per task; every variant of
//! the embeddings (projections, bands, post-processed copies) shares that
//! vocabulary, so only the vectors change between evaluations. Independent
//! evaluations run on the rayon pool and are collected by index, so reports
//! do not depend on scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use wordpca_core::text::{cosine_f32, resolve};
use wordpca_core::{
    accuracy, explained_variance_ratio, ppa, predict, project_matrix, spearman, train_logreg, ComponentRange,
    EmbeddingSet, LogRegConfig, Matrix, PcaModel, PpaConfig, SimilarityDataset, SplitBand,
};

use crate::datasets::{LabeledTextDataset, Split};
use crate::formats::logreg::ClassifierConfig;
use crate::report::{EvalReport, ResultRow};
use crate::{Error, Result};

/// Seed of the random-embedding baseline.
pub const RANDOM_BASELINE_SEED: u64 = 0;
/// Iteration cap for each per-component probe.
pub const DEFAULT_PROBE_MAX_ITERS: usize = 200;

#[derive(Debug, Clone)]
pub enum Task {
    Similarity(SimilarityDataset),
    Classification(LabeledTextDataset),
}

impl Task {
    pub fn name(&self) -> &str {
        match self {
            Task::Similarity(d) => d.name(),
            Task::Classification(d) => &d.name,
        }
    }

    pub fn metric(&self) -> &'static str {
        match self {
            Task::Similarity(_) => "rho",
            Task::Classification(_) => "accuracy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub classifier: LogRegConfig,
    /// 1 for the file's fixed train/test split, otherwise k-fold
    /// cross-validation over all records.
    pub folds: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { classifier: LogRegConfig::default(), folds: 1 }
    }
}

impl EvalConfig {
    pub fn to_json(&self) -> serde_json::Value {
        json!({ "classifier": ClassifierConfig::from(&self.classifier), "folds": self.folds })
    }
}

/// Row-major `f32` vectors seen through the column window `[start, end)`.
#[derive(Debug, Clone, Copy)]
pub struct VectorView<'a> {
    data: &'a [f32],
    stride: usize,
    start: usize,
    end: usize,
}

impl<'a> VectorView<'a> {
    pub fn new(data: &'a [f32], stride: usize, start: usize, end: usize) -> Self {
        assert!(start < end && end <= stride && data.len().is_multiple_of(stride));
        VectorView { data, stride, start, end }
    }

    pub fn of(e: &'a EmbeddingSet) -> Self {
        Self::new(e.as_slice(), e.dim(), 0, e.dim())
    }

    #[inline]
    pub fn row(&self, i: usize) -> &'a [f32] {
        &self.data[i * self.stride + self.start..i * self.stride + self.end]
    }

    pub fn dim(&self) -> usize {
        self.end - self.start
    }

    /// Mean of the given rows in `f64`, zero for an empty list.
    fn mean_of_rows(&self, rows: &[usize], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if rows.is_empty() {
            return;
        }
        for &r in rows {
            for (a, &v) in out.iter_mut().zip(self.row(r)) {
                *a += f64::from(v);
            }
        }
        let n = rows.len() as f64;
        out.iter_mut().for_each(|a| *a /= n);
    }
}

/// A labeled record with its tokens mapped to vocabulary rows.
#[derive(Debug, Clone)]
pub struct ResolvedRecord {
    pub split: Split,
    pub label: String,
    pub rows: Vec<usize>,
}

/// A task with its tokens mapped to vocabulary rows.
#[derive(Debug, Clone)]
pub enum PreparedTask {
    Similarity { name: String, pairs: Vec<(usize, usize, f64)>, skipped: usize },
    Classification { name: String, records: Vec<ResolvedRecord> },
}

impl PreparedTask {
    pub fn new(task: &Task, vocab: &EmbeddingSet) -> Self {
        match task {
            Task::Similarity(ds) => {
                let mut pairs = Vec::with_capacity(ds.pairs().len());
                for p in ds.pairs() {
                    if let (Some(a), Some(b)) = (resolve(vocab, p.a.as_bytes()), resolve(vocab, p.b.as_bytes())) {
                        pairs.push((a, b, p.score));
                    }
                }
                let skipped = ds.pairs().len() - pairs.len();
                PreparedTask::Similarity { name: ds.name().to_owned(), pairs, skipped }
            }
            Task::Classification(ds) => PreparedTask::Classification {
                name: ds.name.clone(),
                records: ds
                    .records
                    .iter()
                    .map(|r| ResolvedRecord {
                        split: r.split,
                        label: r.label.clone(),
                        rows: r.tokens.iter().filter_map(|t| resolve(vocab, t.as_bytes())).collect(),
                    })
                    .collect(),
            },
        }
    }

    pub fn name(&self) -> &str {
        match self {
            PreparedTask::Similarity { name, .. } | PreparedTask::Classification { name, .. } => name,
        }
    }

    pub fn metric(&self) -> &'static str {
        match self {
            PreparedTask::Similarity { .. } => "rho",
            PreparedTask::Classification { .. } => "accuracy",
        }
    }

    /// Spearman rho for similarity tasks, test accuracy for classification.
    pub fn score(&self, view: VectorView<'_>, cfg: &EvalConfig) -> Result<f64> {
        match self {
            PreparedTask::Similarity { pairs, .. } => {
                if pairs.len() < 2 {
                    return Err(wordpca_core::Error::TooFewEvaluablePairs { evaluated: pairs.len() }.into());
                }
                let model: Vec<f64> = pairs.iter().map(|&(a, b, _)| cosine_f32(view.row(a), view.row(b))).collect();
                let human: Vec<f64> = pairs.iter().map(|p| p.2).collect();
                Ok(spearman(&model, &human)?)
            }
            PreparedTask::Classification { records, .. } => classify(records, view, cfg),
        }
    }

    /// Evaluated and skipped pair counts of a similarity task.
    pub fn coverage(&self) -> Option<(usize, usize)> {
        match self {
            PreparedTask::Similarity { pairs, skipped, .. } => Some((pairs.len(), *skipped)),
            PreparedTask::Classification { .. } => None,
        }
    }
}

fn features(records: &[&ResolvedRecord], view: VectorView<'_>) -> Matrix {
    let d = view.dim();
    let mut m = Matrix::zeros(records.len(), d);
    for (i, r) in records.iter().enumerate() {
        view.mean_of_rows(&r.rows, m.row_mut(i));
    }
    m
}

fn train_and_test(
    train: &[&ResolvedRecord],
    test: &[&ResolvedRecord],
    view: VectorView<'_>,
    cfg: &LogRegConfig,
) -> Result<f64> {
    if train.len() < 2 {
        return Err(wordpca_core::Error::TooFewRecords { needed: 2, found: train.len() }.into());
    }
    if test.is_empty() {
        return Err(wordpca_core::Error::TooFewRecords { needed: 1, found: 0 }.into());
    }
    let labels: Vec<&str> = train.iter().map(|r| r.label.as_str()).collect();
    let model = train_logreg(&features(train, view), &labels, cfg)?;
    let predicted = predict(&model, &features(test, view))?;
    let gold: Vec<&str> = test.iter().map(|r| r.label.as_str()).collect();
    Ok(accuracy(&predicted, &gold)?)
}

fn classify(records: &[ResolvedRecord], view: VectorView<'_>, cfg: &EvalConfig) -> Result<f64> {
    if cfg.folds <= 1 {
        let train: Vec<_> = records.iter().filter(|r| r.split == Split::Train).collect();
        let test: Vec<_> = records.iter().filter(|r| r.split == Split::Test).collect();
        return train_and_test(&train, &test, view, &cfg.classifier);
    }
    let k = cfg.folds;
    if records.len() < k {
        return Err(wordpca_core::Error::TooFewRecords { needed: k, found: records.len() }.into());
    }
    let mut total = 0.0;
    for fold in 0..k {
        let (test, train): (Vec<_>, Vec<_>) = records.iter().enumerate().partition(|(i, _)| i % k == fold);
        let test: Vec<_> = test.into_iter().map(|(_, r)| r).collect();
        let train: Vec<_> = train.into_iter().map(|(_, r)| r).collect();
        total += train_and_test(&train, &test, view, &cfg.classifier)?;
    }
    Ok(total / k as f64)
}

/// Scores one task on `e`.
pub fn evaluate(task: &Task, e: &EmbeddingSet, cfg: &EvalConfig) -> Result<f64> {
    PreparedTask::new(task, e).score(VectorView::of(e), cfg)
}

/// Evaluates every task on `e` as-is.
pub fn evaluate_all(e: &EmbeddingSet, tasks: &[Task], cfg: &EvalConfig) -> Result<EvalReport> {
    let prepared: Vec<_> = tasks.iter().map(|t| PreparedTask::new(t, e)).collect();
    let scores: Vec<f64> = prepared.par_iter().map(|p| p.score(VectorView::of(e), cfg)).collect::<Result<_>>()?;
    let mut report = EvalReport::new("eval");
    for (p, s) in prepared.iter().zip(scores) {
        report.push(ResultRow::new(p.name(), p.metric(), s));
        if let Some((evaluated, skipped)) = p.coverage() {
            report.push(ResultRow::new(p.name(), "evaluated_pairs", evaluated as f64));
            report.push(ResultRow::new(p.name(), "skipped_pairs", skipped as f64));
        }
    }
    report.config = json!({ "eval": cfg.to_json() });
    Ok(report)
}

fn check_model(e: &EmbeddingSet, model: &PcaModel) -> Result<()> {
    if e.dim() != model.dim() {
        return Err(wordpca_core::Error::DimensionMismatch { expected: model.dim(), found: e.dim() }.into());
    }
    Ok(())
}

/// All principal coordinates of `e`, rounded to `f32`, row-major.
fn principal_coordinates(e: &EmbeddingSet, model: &PcaModel) -> Result<Vec<f32>> {
    let m = project_matrix(e, model, ComponentRange::full(model.dim())?)?;
    Ok(m.as_slice().iter().map(|&v| v as f32).collect())
}

/// Evaluates every task on the embeddings projected onto the top `k`
/// components for `k = step, 2·step, …, d`.
pub fn dimension_sweep(
    e: &EmbeddingSet,
    model: &PcaModel,
    tasks: &[Task],
    step: usize,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    check_model(e, model)?;
    let d = model.dim();
    if step == 0 || !d.is_multiple_of(step) {
        return Err(Error::InvalidArgument(format!("step {step} must divide the dimension {d}")));
    }
    let coords = principal_coordinates(e, model)?;
    let prepared: Vec<_> = tasks.iter().map(|t| PreparedTask::new(t, e)).collect();
    let grid: Vec<(usize, usize)> =
        (0..prepared.len()).flat_map(|t| (step..=d).step_by(step).map(move |k| (t, k))).collect();
    let scores: Vec<f64> = grid
        .par_iter()
        .map(|&(t, k)| prepared[t].score(VectorView::new(&coords, d, 0, k), cfg))
        .collect::<Result<_>>()?;

    let mut report = EvalReport::new("sweep");
    for (&(t, k), s) in grid.iter().zip(scores) {
        report.push(ResultRow::point(prepared[t].name(), prepared[t].metric(), k as f64, s));
    }
    report.config = json!({ "dim": d, "step": step, "eval": cfg.to_json() });
    Ok(report)
}

/// Random embeddings for the given vocabulary: entries uniform in
/// `[-0.5, 0.5) / dim` from a ChaCha8 stream seeded with `seed`, drawn row
/// by row. Each entry uses the top 53 bits of one 64-bit output.
pub fn random_embeddings(words: &[Vec<u8>], dim: usize, seed: u64) -> Result<EmbeddingSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / dim as f64;
    let data = (0..words.len() * dim)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            ((u - 0.5) * scale) as f32
        })
        .collect();
    Ok(EmbeddingSet::new(words.to_vec(), dim, data)?)
}

/// Variance share of the top, middle and bottom thirds of the components,
/// and every task evaluated on the full embeddings, on each band, and on
/// random embeddings of band width.
pub fn split_eval(e: &EmbeddingSet, model: &PcaModel, tasks: &[Task], cfg: &EvalConfig) -> Result<EvalReport> {
    check_model(e, model)?;
    let d = model.dim();
    let bands: Vec<(SplitBand, ComponentRange)> =
        SplitBand::ALL.iter().map(|&b| b.range(d).map(|r| (b, r))).collect::<wordpca_core::Result<_>>()?;
    let coords = principal_coordinates(e, model)?;
    let random = random_embeddings(e.words(), d / 3, RANDOM_BASELINE_SEED)?;
    let prepared: Vec<_> = tasks.iter().map(|t| PreparedTask::new(t, e)).collect();

    let mut views: Vec<(String, VectorView<'_>)> = vec![("full".to_owned(), VectorView::of(e))];
    for (band, range) in &bands {
        views.push((band.letter().to_owned(), VectorView::new(&coords, d, range.start(), range.end())));
    }
    views.push(("random".to_owned(), VectorView::of(&random)));

    let grid: Vec<(usize, usize)> = (0..prepared.len()).flat_map(|t| (0..views.len()).map(move |v| (t, v))).collect();
    let scores: Vec<f64> = grid.par_iter().map(|&(t, v)| prepared[t].score(views[v].1, cfg)).collect::<Result<_>>()?;

    let mut report = EvalReport::new("split");
    for (band, range) in &bands {
        report.push(ResultRow::new("variance", band.letter(), explained_variance_ratio(model, *range)));
    }
    for (&(t, v), s) in grid.iter().zip(scores) {
        report.push(ResultRow::new(prepared[t].name(), &views[v].0, s));
    }
    report.config = json!({
        "dim": d,
        "band_width": d / 3,
        "random_baseline": { "seed": RANDOM_BASELINE_SEED, "distribution": "uniform[-0.5,0.5)/dim", "dim": d / 3 },
        "eval": cfg.to_json(),
    });
    Ok(report)
}

/// Original embeddings against PPA with `ppa_cfg` and against mean removal
/// alone, with per-task deltas relative to the original.
pub fn ppa_compare(e: &EmbeddingSet, ppa_cfg: PpaConfig, tasks: &[Task], cfg: &EvalConfig) -> Result<EvalReport> {
    let processed = ppa(e, ppa_cfg)?;
    let mean_only = ppa(e, PpaConfig::new(0))?;
    let variants = [("original", e), ("ppa", &processed), ("mean_only", &mean_only)];
    let prepared: Vec<_> = tasks.iter().map(|t| PreparedTask::new(t, e)).collect();
    let grid: Vec<(usize, usize)> = (0..prepared.len()).flat_map(|t| (0..3).map(move |v| (t, v))).collect();
    let scores: Vec<f64> =
        grid.par_iter().map(|&(t, v)| prepared[t].score(VectorView::of(variants[v].1), cfg)).collect::<Result<_>>()?;

    let mut report = EvalReport::new("ppa_compare");
    for (t, p) in prepared.iter().enumerate() {
        let s = &scores[3 * t..3 * t + 3];
        for (v, (name, _)) in variants.iter().enumerate() {
            report.push(ResultRow::new(p.name(), *name, s[v]));
        }
        report.push(ResultRow::new(p.name(), "delta_ppa", s[1] - s[0]));
        report.push(ResultRow::new(p.name(), "delta_mean_only", s[2] - s[0]));
    }
    report.config = json!({ "d_top": ppa_cfg.d_top, "eval": cfg.to_json() });
    Ok(report)
}

/// Trains and tests one classifier per principal component, each on
/// sentence vectors averaged from one-dimensional word embeddings.
pub fn probe_components(
    e: &EmbeddingSet,
    model: &PcaModel,
    dataset: &LabeledTextDataset,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    check_model(e, model)?;
    let d = model.dim();
    let coords = principal_coordinates(e, model)?;
    let prepared = PreparedTask::new(&Task::Classification(dataset.clone()), e);
    let scores: Vec<f64> = (0..d)
        .into_par_iter()
        .map(|i| prepared.score(VectorView::new(&coords, d, i, i + 1), cfg))
        .collect::<Result<_>>()?;

    let mut report = EvalReport::new("probe");
    for (i, s) in scores.iter().enumerate() {
        report.push(ResultRow::point(&dataset.name, "accuracy", i as f64, *s));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let std = (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt();
    let classes = dataset.labels().len();
    report.push(ResultRow::new("summary", "mean", mean));
    report.push(ResultRow::new("summary", "std", std));
    report.push(ResultRow::new("summary", "chance", 1.0 / classes as f64));
    report.push(ResultRow::new("summary", "classes", classes as f64));
    report.config = json!({ "dim": d, "eval": cfg.to_json() });
    Ok(report)
}
