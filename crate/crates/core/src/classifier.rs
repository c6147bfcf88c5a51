//! Deterministic multinomial logistic regression.
//!
//! Full-batch gradient descent from zero weights on the mean softmax
//! cross-entropy plus an L2 penalty on the non-bias weights. Each iteration
//! tries twice the previously accepted step and halves it until the Armijo
//! condition holds, so the loss sequence is strictly decreasing. There is no
//! randomness anywhere: the same inputs give bit-identical weights.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, log, sqrt};

use crate::matrix::Matrix;
use crate::{Error, Result};

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;
const MAX_STEP: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegConfig {
    /// Penalty weight; `None` means `1 / M` for `M` training rows.
    pub l2_strength: Option<f64>,
    pub max_iters: usize,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
    /// Step tried on the first iteration.
    pub initial_step: f64,
    /// Z-score features with training statistics before fitting.
    pub standardize: bool,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig { l2_strength: None, max_iters: 1000, tolerance: 1e-6, initial_step: 1.0, standardize: false }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(l2) = self.l2_strength {
            if !(l2.is_finite() && l2 >= 0.0) {
                return Err(Error::InvalidConfig("l2_strength must be finite and non-negative".into()));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) {
            return Err(Error::InvalidConfig("initial_step must be positive".into()));
        }
        Ok(())
    }
}

/// How training ended.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSummary {
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub final_loss: f64,
    /// False when `max_iters` ran out or no descent step could be found.
    pub converged: bool,
    /// Effective penalty weight.
    pub l2_strength: f64,
    /// Objective at the initial point and after every accepted step.
    pub loss_history: Vec<f64>,
}

/// Per-feature affine map applied before the linear layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    fn fit(x: &Matrix) -> Self {
        let (m, d) = (x.rows() as f64, x.cols());
        let mut mean = vec![0.0; d];
        for row in x.iter_rows() {
            for (a, v) in mean.iter_mut().zip(row) {
                *a += v;
            }
        }
        mean.iter_mut().for_each(|a| *a /= m);
        let mut var = vec![0.0; d];
        for row in x.iter_rows() {
            for ((s, v), mu) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - mu) * (v - mu);
            }
        }
        let scale = var.iter().map(|s| if *s > 0.0 { sqrt(s / m) } else { 1.0 }).collect();
        Standardizer { mean, scale }
    }

    fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, mu), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = (*v - mu) / s;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    classes: Vec<String>,
    features: usize,
    /// `C × (d + 1)` row-major, bias in the last column.
    weights: Vec<f64>,
    standardizer: Option<Standardizer>,
    summary: TrainingSummary,
    config: LogRegConfig,
}

impl LogRegModel {
    /// Rebuilds a stored model.
    pub fn from_parts(
        classes: Vec<String>,
        features: usize,
        weights: Vec<f64>,
        standardizer: Option<Standardizer>,
        summary: TrainingSummary,
        config: LogRegConfig,
    ) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::SingleClass);
        }
        let want = classes.len() * (features + 1);
        if weights.len() != want {
            return Err(Error::DimensionMismatch { expected: want, found: weights.len() });
        }
        if let Some(p) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFiniteValue { row: p / (features + 1), col: p % (features + 1) });
        }
        if let Some(s) = &standardizer {
            if s.mean.len() != features || s.scale.len() != features {
                return Err(Error::DimensionMismatch { expected: features, found: s.mean.len() });
            }
        }
        Ok(LogRegModel { classes, features, weights, standardizer, summary, config })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn num_features(&self) -> usize {
        self.features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    pub fn summary(&self) -> &TrainingSummary {
        &self.summary
    }

    pub fn config(&self) -> &LogRegConfig {
        &self.config
    }

    /// Class scores for one (already standardized) feature row.
    fn logits(&self, x: &[f64], out: &mut [f64]) {
        let stride = self.features + 1;
        for (c, o) in out.iter_mut().enumerate() {
            let w = &self.weights[c * stride..(c + 1) * stride];
            *o = w[..self.features].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[self.features];
        }
    }
}

/// The regularized objective over a fixed training set.
pub struct LogRegObjective<'a> {
    features: &'a Matrix,
    targets: &'a [usize],
    classes: usize,
    l2: f64,
}

impl<'a> LogRegObjective<'a> {
    pub fn new(features: &'a Matrix, targets: &'a [usize], classes: usize, l2: f64) -> Self {
        debug_assert_eq!(features.rows(), targets.len());
        LogRegObjective { features, targets, classes, l2 }
    }

    /// Number of weights, `C × (d + 1)`.
    pub fn num_params(&self) -> usize {
        self.classes * (self.features.cols() + 1)
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        self.evaluate(w, None)
    }

    /// Objective value, writing the gradient into `grad`.
    pub fn value_and_gradient(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        self.evaluate(w, Some(grad))
    }

    fn evaluate(&self, w: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let d = self.features.cols();
        let stride = d + 1;
        let c_count = self.classes;
        let m = self.features.rows() as f64;
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        let mut z = vec![0.0; c_count];
        let mut loss = 0.0;
        for (x, &y) in self.features.iter_rows().zip(self.targets) {
            for (c, zc) in z.iter_mut().enumerate() {
                let wc = &w[c * stride..(c + 1) * stride];
                *zc = wc[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + wc[d];
            }
            let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for zc in z.iter_mut() {
                *zc = exp(*zc - zmax);
                sum += *zc;
            }
            // z now holds unnormalized probabilities
            loss += log(sum) - log(z[y]);
            if let Some(g) = grad.as_deref_mut() {
                for (c, &zc) in z.iter().enumerate() {
                    let r = zc / sum - if c == y { 1.0 } else { 0.0 };
                    let gc = &mut g[c * stride..(c + 1) * stride];
                    for (gv, xv) in gc[..d].iter_mut().zip(x) {
                        *gv += r * xv;
                    }
                    gc[d] += r;
                }
            }
        }
        loss /= m;
        let mut penalty = 0.0;
        for c in 0..c_count {
            for j in 0..d {
                penalty += w[c * stride + j] * w[c * stride + j];
            }
        }
        if let Some(g) = grad {
            g.iter_mut().for_each(|v| *v /= m);
            for c in 0..c_count {
                for j in 0..d {
                    g[c * stride + j] += self.l2 * w[c * stride + j];
                }
            }
        }
        loss + 0.5 * self.l2 * penalty
    }
}

/// Trains a classifier on `features` (one row per example) and `labels`.
///
/// Classes are ordered by first appearance in `labels`.
pub fn train_logreg<L: AsRef<str>>(features: &Matrix, labels: &[L], cfg: &LogRegConfig) -> Result<LogRegModel> {
    cfg.validate()?;
    let m = features.rows();
    if labels.len() != m {
        return Err(Error::LengthMismatch { left: m, right: labels.len() });
    }
    if m < 2 {
        return Err(Error::TooFewRecords { needed: 2, found: m });
    }
    if let Some(p) = features.as_slice().iter().position(|v| !v.is_finite()) {
        let d = features.cols().max(1);
        return Err(Error::NonFiniteFeature { row: p / d, col: p % d });
    }

    let mut classes: Vec<String> = Vec::new();
    let mut targets = Vec::with_capacity(m);
    for label in labels {
        let label = label.as_ref();
        let idx = match classes.iter().position(|c| c == label) {
            Some(i) => i,
            None => {
                classes.push(String::from(label));
                classes.len() - 1
            }
        };
        targets.push(idx);
    }
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }

    let standardizer = cfg.standardize.then(|| Standardizer::fit(features));
    let scaled;
    let x = match &standardizer {
        Some(s) => {
            scaled = s.apply(features);
            &scaled
        }
        None => features,
    };

    let l2 = cfg.l2_strength.unwrap_or(1.0 / m as f64);
    let objective = LogRegObjective::new(x, &targets, classes.len(), l2);
    let n = objective.num_params();
    let mut w = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];

    let mut loss = objective.value_and_gradient(&w, &mut grad);
    let mut history = vec![loss];
    let mut step = cfg.initial_step;
    let mut gnorm = norm(&grad);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        if gnorm < cfg.tolerance {
            converged = true;
            break;
        }
        let g2 = gnorm * gnorm;
        let mut accepted = None;
        let mut eta = step;
        while eta >= MIN_STEP {
            for ((t, wi), gi) in trial.iter_mut().zip(&w).zip(&grad) {
                *t = wi - eta * gi;
            }
            let candidate = objective.value(&trial);
            if candidate <= loss - ARMIJO_C * eta * g2 {
                accepted = Some(candidate);
                break;
            }
            eta *= 0.5;
        }
        if accepted.is_none() {
            break;
        }
        core::mem::swap(&mut w, &mut trial);
        loss = objective.value_and_gradient(&w, &mut grad);
        history.push(loss);
        gnorm = norm(&grad);
        iterations += 1;
        step = (eta * 2.0).min(MAX_STEP);
    }
    if !converged && gnorm < cfg.tolerance {
        converged = true;
    }

    let summary = TrainingSummary {
        iterations,
        final_gradient_norm: gnorm,
        final_loss: loss,
        converged,
        l2_strength: l2,
        loss_history: history,
    };
    Ok(LogRegModel { classes, features: features.cols(), weights: w, standardizer, summary, config: cfg.clone() })
}

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

/// Index into `model.classes()` of the highest-scoring class for each row;
/// ties go to the lowest index.
pub fn predict_indices(model: &LogRegModel, features: &Matrix) -> Result<Vec<usize>> {
    if features.cols() != model.features {
        return Err(Error::DimensionMismatch { expected: model.features, found: features.cols() });
    }
    let scaled;
    let x = match &model.standardizer {
        Some(s) => {
            scaled = s.apply(features);
            &scaled
        }
        None => features,
    };
    let mut z = vec![0.0; model.classes.len()];
    let mut out = Vec::with_capacity(x.rows());
    for row in x.iter_rows() {
        model.logits(row, &mut z);
        let mut best = 0;
        for (c, &v) in z.iter().enumerate().skip(1) {
            if v > z[best] {
                best = c;
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Predicted labels for each row of `features`.
pub fn predict<'m>(model: &'m LogRegModel, features: &Matrix) -> Result<Vec<&'m str>> {
    Ok(predict_indices(model, features)?.into_iter().map(|i| model.classes[i].as_str()).collect())
}

/// Fraction of positions where `predicted` equals `gold`.
pub fn accuracy<A, B>(predicted: &[A], gold: &[B]) -> Result<f64>
where
    A: PartialEq<B>,
{
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch { left: predicted.len(), right: gold.len() });
    }
    if predicted.is_empty() {
        return Err(Error::TooFewRecords { needed: 1, found: 0 });
    }
    let hits = predicted.iter().zip(gold).filter(|(p, g)| *p == *g).count();
    Ok(hits as f64 / predicted.len() as f64)
}
