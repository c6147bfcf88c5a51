//! Principal-component post-processing: top-component removal (PPA), the
//! PPA → PCA → PPA reduction pipeline, variance-band splits and
//! single-component projections.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::embedding::EmbeddingSet;
use crate::matrix::{dot, Matrix};
use crate::pca::{fit_pca, project, project_matrix, row_mean, ComponentRange, PcaModel};
use crate::{Error, Result};

/// Number of top principal components to remove.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PpaConfig {
    pub d_top: usize,
}

impl PpaConfig {
    /// Removal depth used for 300-dimensional embeddings.
    pub const DEFAULT_D_TOP: usize = 5;

    pub fn new(d_top: usize) -> Self {
        PpaConfig { d_top }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.d_top > dim {
            return Err(Error::InvalidConfig(alloc::format!("d_top = {} exceeds dimension {dim}", self.d_top)));
        }
        Ok(())
    }
}

impl Default for PpaConfig {
    fn default() -> Self {
        PpaConfig { d_top: Self::DEFAULT_D_TOP }
    }
}

/// A fitted PPA: the mean to subtract and the directions to remove.
#[derive(Debug, Clone)]
pub struct PpaTransform {
    dim: usize,
    mean: Vec<f64>,
    /// `d_top` directions back to back.
    directions: Vec<f64>,
}

impl PpaTransform {
    /// Fits the mean and the top `cfg.d_top` principal components of `x`.
    ///
    /// With `d_top = 0` no eigendecomposition is needed and only the mean is
    /// computed, so single-row inputs are accepted.
    pub fn fit(x: &EmbeddingSet, cfg: PpaConfig) -> Result<Self> {
        cfg.validate(x.dim())?;
        if cfg.d_top == 0 {
            return Ok(PpaTransform { dim: x.dim(), mean: row_mean(x), directions: Vec::new() });
        }
        let model = fit_pca(x)?;
        Ok(Self::from_model(&model, cfg.d_top))
    }

    pub fn from_model(model: &PcaModel, d_top: usize) -> Self {
        let d = model.dim();
        let d_top = d_top.min(d);
        PpaTransform { dim: d, mean: model.mean().to_vec(), directions: model.components()[..d_top * d].to_vec() }
    }

    pub fn d_top(&self) -> usize {
        self.directions.len() / self.dim
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i * self.dim..(i + 1) * self.dim]
    }

    /// Removes the projections of an already centered row onto the stored
    /// directions. Coefficients are taken against the input row.
    pub fn remove_projections(&self, centered: &mut [f64], coeffs: &mut Vec<f64>) {
        coeffs.clear();
        coeffs.extend(self.directions.chunks_exact(self.dim).map(|u| dot(u, centered)));
        for (u, &c) in self.directions.chunks_exact(self.dim).zip(coeffs.iter()) {
            for (v, &ui) in centered.iter_mut().zip(u) {
                *v -= c * ui;
            }
        }
    }

    /// Centers every row of `x` and removes the top directions, in `f64`.
    pub fn apply_matrix(&self, x: &EmbeddingSet) -> Result<Matrix> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        let mut out = Matrix::zeros(x.len(), self.dim);
        let mut coeffs = Vec::with_capacity(self.d_top());
        for (i, row) in x.rows().enumerate() {
            let dst = out.row_mut(i);
            for ((o, &v), m) in dst.iter_mut().zip(row).zip(&self.mean) {
                *o = f64::from(v) - m;
            }
            self.remove_projections(dst, &mut coeffs);
        }
        Ok(out)
    }

    pub fn apply(&self, x: &EmbeddingSet) -> Result<EmbeddingSet> {
        let m = self.apply_matrix(x)?;
        x.with_matrix(self.dim, m.as_slice())
    }
}

/// Subtracts the row mean from every row.
pub fn center(x: &EmbeddingSet) -> Result<EmbeddingSet> {
    PpaTransform::fit(x, PpaConfig::new(0))?.apply(x)
}

/// Post-processes `x`: subtract the mean, then remove each row's projection
/// onto the top `cfg.d_top` principal components. The mean is not restored.
pub fn ppa(x: &EmbeddingSet, cfg: PpaConfig) -> Result<EmbeddingSet> {
    PpaTransform::fit(x, cfg)?.apply(x)
}

/// PPA, then PCA down to `k` dimensions, then PPA again on the reduced
/// vectors, with the same removal depth at both stages.
pub fn ppa_pca_reduce(x: &EmbeddingSet, cfg: PpaConfig, k: usize) -> Result<EmbeddingSet> {
    ppa_pca_reduce_with(x, cfg, k, cfg)
}

/// [`ppa_pca_reduce`] with an independent removal depth for the second stage.
pub fn ppa_pca_reduce_with(x: &EmbeddingSet, first: PpaConfig, k: usize, second: PpaConfig) -> Result<EmbeddingSet> {
    if k == 0 || k >= x.dim() {
        return Err(Error::InvalidConfig(alloc::format!("target dimension {k} must satisfy 1 <= k < {}", x.dim())));
    }
    first.validate(x.dim())?;
    second.validate(k)?;
    let stage1 = ppa(x, first)?;
    let model = fit_pca(&stage1)?;
    let reduced = project(&stage1, &model, ComponentRange::new(0, k, x.dim())?)?;
    ppa(&reduced, second)
}

/// Top, middle or bottom third of the principal components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SplitBand {
    Top,
    Middle,
    Bottom,
}

impl SplitBand {
    pub const ALL: [SplitBand; 3] = [SplitBand::Top, SplitBand::Middle, SplitBand::Bottom];

    /// Contiguous band of width `dim / 3`; `[0,100)`, `[100,200)`, `[200,300)`
    /// for 300-dimensional models.
    pub fn range(self, dim: usize) -> Result<ComponentRange> {
        if dim == 0 || !dim.is_multiple_of(3) {
            return Err(Error::NonDivisibleDim { dim });
        }
        let w = dim / 3;
        let start = match self {
            SplitBand::Top => 0,
            SplitBand::Middle => w,
            SplitBand::Bottom => 2 * w,
        };
        ComponentRange::new(start, start + w, dim)
    }

    pub fn letter(self) -> &'static str {
        match self {
            SplitBand::Top => "T",
            SplitBand::Middle => "M",
            SplitBand::Bottom => "B",
        }
    }
}

impl fmt::Display for SplitBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

impl FromStr for SplitBand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" | "top" => Ok(SplitBand::Top),
            "M" | "m" | "middle" => Ok(SplitBand::Middle),
            "B" | "b" | "bottom" => Ok(SplitBand::Bottom),
            other => Err(Error::InvalidConfig(alloc::format!("unknown band {other:?}"))),
        }
    }
}

/// Embeddings built from one variance band of `model`.
pub fn split_projection(x: &EmbeddingSet, model: &PcaModel, band: SplitBand) -> Result<EmbeddingSet> {
    if x.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: x.dim() });
    }
    project(x, model, band.range(model.dim())?)
}

/// Coordinates of every row along component `rank`, in `f64`.
pub fn component_values(x: &EmbeddingSet, model: &PcaModel, rank: usize) -> Result<Vec<f64>> {
    let range = component_range(model, rank)?;
    Ok(project_matrix(x, model, range)?.into_vec())
}

/// One-dimensional embeddings: each row projected onto component `rank`.
pub fn component_projection(x: &EmbeddingSet, model: &PcaModel, rank: usize) -> Result<EmbeddingSet> {
    project(x, model, component_range(model, rank)?)
}

fn component_range(model: &PcaModel, rank: usize) -> Result<ComponentRange> {
    if rank >= model.dim() {
        return Err(Error::RankOutOfBounds { rank, dim: model.dim() });
    }
    ComponentRange::new(rank, rank + 1, model.dim())
}
