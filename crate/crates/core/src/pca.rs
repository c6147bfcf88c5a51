//! Principal components of an embedding matrix.
//!
//! The fit forms the `d × d` sample covariance (divisor `N − 1`) of the
//! centered rows and eigendecomposes it. Rows are accumulated sequentially in
//! file order so that two fits of the same matrix are bit-identical.

use alloc::vec;
use alloc::vec::Vec;

use crate::embedding::EmbeddingSet;
use crate::linalg::symmetric_eigen;
use crate::matrix::{dot, Matrix};
use crate::{Error, Result};

/// Half-open range `[start, end)` of component ranks, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentRange {
    start: usize,
    end: usize,
}

impl ComponentRange {
    pub fn new(start: usize, end: usize, dim: usize) -> Result<Self> {
        if start >= end || end > dim {
            return Err(Error::InvalidRange { start, end, dim });
        }
        Ok(ComponentRange { start, end })
    }

    pub fn full(dim: usize) -> Result<Self> {
        Self::new(0, dim, dim)
    }

    #[inline]
    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    pub fn end(&self) -> usize {
        self.end
    }

    #[allow(clippy::len_without_is_empty)]
    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.end > dim {
            return Err(Error::InvalidRange { start: self.start, end: self.end, dim });
        }
        Ok(())
    }
}

/// Mean vector, orthonormal components ordered by descending variance, and
/// the variance of the centered data along each component.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    dim: usize,
    mean: Vec<f64>,
    /// Component `i` occupies `components[i * dim..(i + 1) * dim]`.
    components: Vec<f64>,
    variances: Vec<f64>,
}

impl PcaModel {
    /// Reassembles a model from stored parts, checking shapes and that the
    /// variances are finite, non-negative and non-increasing.
    pub fn from_parts(dim: usize, mean: Vec<f64>, components: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyEmbeddings);
        }
        if mean.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: mean.len() });
        }
        if components.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: components.len() });
        }
        if variances.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: variances.len() });
        }
        if let Some(p) = mean.iter().chain(&components).position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row: p / dim, col: p % dim });
        }
        if variances.iter().any(|v| !v.is_finite() || *v < 0.0) || variances.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("variances must be finite, non-negative and non-increasing".into()));
        }
        Ok(PcaModel { dim, mean, components, variances })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// The `i`-th principal direction (rank 0 has the largest variance).
    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.dim..(i + 1) * self.dim]
    }

    /// All components back to back; equivalently the component matrix in
    /// column-major order.
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn total_variance(&self) -> f64 {
        self.variances.iter().sum()
    }

    /// Coordinates of `v` along components `range`, after centering.
    pub fn project_row(&self, v: &[f32], range: ComponentRange, out: &mut [f64], scratch: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        for ((c, &x), m) in scratch.iter_mut().zip(v).zip(&self.mean) {
            *c = f64::from(x) - m;
        }
        for (o, i) in out.iter_mut().zip(range.start..range.end) {
            *o = dot(self.component(i), scratch);
        }
    }
}

/// Sample mean of the rows, accumulated in row order.
pub(crate) fn row_mean(x: &EmbeddingSet) -> Vec<f64> {
    let d = x.dim();
    let mut mean = vec![0.0; d];
    for row in x.rows() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += f64::from(v);
        }
    }
    let n = x.len() as f64;
    for m in &mut mean {
        *m /= n;
    }
    mean
}

/// Fits the principal components of `x`.
///
/// Each component is sign-normalized so that its largest-magnitude entry is
/// positive (ties go to the lowest index).
pub fn fit_pca(x: &EmbeddingSet) -> Result<PcaModel> {
    let n = x.len();
    if n < 2 {
        return Err(Error::DegenerateInput { rows: n });
    }
    let d = x.dim();
    let mean = row_mean(x);

    // upper triangle, row by row
    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for row in x.rows() {
        for ((c, &v), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = f64::from(v) - m;
        }
        for i in 0..d {
            let ci = centered[i];
            let dst = &mut cov[i * d + i..(i + 1) * d];
            for (acc, &cj) in dst.iter_mut().zip(&centered[i..]) {
                *acc += ci * cj;
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }

    let eig = symmetric_eigen(&cov, d)?;
    let mut order: Vec<usize> = (0..d).collect();
    // stable: equal eigenvalues keep the solver's order
    order.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]));

    let mut components = Vec::with_capacity(d * d);
    let mut variances = Vec::with_capacity(d);
    for &j in &order {
        let mut u = eig.vector(j);
        normalize_sign(&mut u);
        components.extend_from_slice(&u);
        variances.push(eig.values[j].max(0.0));
    }
    Ok(PcaModel { dim: d, mean, components, variances })
}

/// Flips `u` so that its largest-magnitude entry (first one on ties) is
/// positive.
pub(crate) fn normalize_sign(u: &mut [f64]) {
    let mut best = 0;
    for (i, v) in u.iter().enumerate() {
        if libm::fabs(*v) > libm::fabs(u[best]) {
            best = i;
        }
    }
    if u.get(best).is_some_and(|v| *v < 0.0) {
        for v in u.iter_mut() {
            *v = -*v;
        }
    }
}

/// Fraction of the total variance carried by the components in `range`.
///
/// Returns 0 when the data has no variance at all.
pub fn explained_variance_ratio(model: &PcaModel, range: ComponentRange) -> f64 {
    let total = model.total_variance();
    if total <= 0.0 {
        return 0.0;
    }
    let end = range.end.min(model.dim);
    model.variances[range.start.min(end)..end].iter().sum::<f64>() / total
}

/// Projects every row of `x` onto the components in `range`, in `f64`.
pub fn project_matrix(x: &EmbeddingSet, model: &PcaModel, range: ComponentRange) -> Result<Matrix> {
    if x.dim() != model.dim {
        return Err(Error::DimensionMismatch { expected: model.dim, found: x.dim() });
    }
    range.check(model.dim)?;
    let k = range.len();
    let mut out = Matrix::zeros(x.len(), k);
    let mut scratch = vec![0.0; model.dim];
    for (i, row) in x.rows().enumerate() {
        model.project_row(row, range, out.row_mut(i), &mut scratch);
    }
    Ok(out)
}

/// Projects `x` onto the components in `range`; the result has
/// `range.len()` columns and the same vocabulary.
pub fn project(x: &EmbeddingSet, model: &PcaModel, range: ComponentRange) -> Result<EmbeddingSet> {
    let m = project_matrix(x, model, range)?;
    x.with_matrix(range.len(), m.as_slice())
}
