//! Node embedding storage, pairwise kernels, and the global 2-D PCA projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major `n × d` matrix; row `u` is the embedding of internal node `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    values: Vec<f64>,
    rows: usize,
    dim: usize,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidData("embedding dimension must be at least 1".into()));
        }
        if values.len() != rows * dim {
            return Err(Error::InvalidData(format!(
                "expected {} values for a {rows}x{dim} embedding, got {}",
                rows * dim,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite embedding value in row {} column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(EmbeddingMatrix { values, rows, dim })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidData(format!(
                "row {bad} has {} values, expected {dim}",
                rows[bad].len()
            )));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Panics if `u` is out of range.
    pub fn row(&self, u: usize) -> &[f64] {
        &self.values[u * self.dim..(u + 1) * self.dim]
    }

    fn checked_row(&self, u: usize) -> Result<&[f64]> {
        if u < self.rows {
            Ok(self.row(u))
        } else {
            Err(Error::NodeNotFound(format!("index {u}")))
        }
    }

    /// Returns a copy with every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.rows, self.dim, self.values.iter().map(|x| x * c).collect())
    }

    /// Returns a copy with `offset` added to every row.
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "offset has {} entries, expected {}",
                offset.len(),
                self.dim
            )));
        }
        let values = self
            .values
            .chunks(self.dim)
            .flat_map(|row| row.iter().zip(offset).map(|(x, o)| x + o))
            .collect();
        Self::new(self.rows, self.dim, values)
    }
}

pub(crate) fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sq_euclidean(y: &EmbeddingMatrix, u: usize, v: usize) -> Result<f64> {
    Ok(sq_distance(y.checked_row(u)?, y.checked_row(v)?))
}

pub fn dot_similarity(y: &EmbeddingMatrix, u: usize, v: usize) -> Result<f64> {
    Ok(dot(y.checked_row(u)?, y.checked_row(v)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extents {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Extents {
    /// Bounding box of `points`; `None` when empty.
    pub fn of(points: impl IntoIterator<Item = [f64; 2]>) -> Option<Extents> {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        Some(iter.fold(Extents { min: first, max: first }, |mut e, p| {
            e.min = [e.min[0].min(p[0]), e.min[1].min(p[1])];
            e.max = [e.max[0].max(p[0]), e.max[1].max(p[1])];
            e
        }))
    }
}

/// Top-two principal axes of an embedding and the projected coordinates of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection2D {
    pub mean: Vec<f64>,
    /// Row-major `2 × d`.
    pub components: [Vec<f64>; 2],
    /// Eigenvalues of the covariance matching `components`.
    pub variances: [f64; 2],
    pub points: Vec<[f64; 2]>,
    pub extents: Extents,
}

/// Fits PCA on the full matrix (covariance normalized by `n − 1`).
///
/// Each component is sign-fixed so that its entry of largest magnitude is
/// positive. When `d < 2` the second component is all zeros.
pub fn pca_project(y: &EmbeddingMatrix) -> Result<Projection2D> {
    let n = y.rows();
    let d = y.dim();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("PCA needs at least 2 rows, got {n}")));
    }
    if y.values().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidData("non-finite embedding value".into()));
    }

    let mut mean = vec![0.0; d];
    for u in 0..n {
        for (m, x) in mean.iter_mut().zip(y.row(u)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for u in 0..n {
        for ((c, x), m) in centered.iter_mut().zip(y.row(u)).zip(&mean) {
            *c = x - m;
        }
        for i in 0..d {
            let ci = centered[i];
            if ci == 0.0 {
                continue;
            }
            let row = &mut cov[i * d..(i + 1) * d];
            for j in i..d {
                row[j] += ci * centered[j];
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

    let (eigenvalues, eigenvectors) = symmetric_eigen(&mut cov, d);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]).then(a.cmp(&b)));

    let axis = |rank: usize| -> (Vec<f64>, f64) {
        match order.get(rank) {
            Some(&col) => {
                let mut v: Vec<f64> = (0..d).map(|i| eigenvectors[i * d + col]).collect();
                fix_sign(&mut v);
                (v, eigenvalues[col].max(0.0))
            }
            None => (vec![0.0; d], 0.0),
        }
    };
    let (first, var1) = axis(0);
    let (second, var2) = axis(1);

    let points: Vec<[f64; 2]> = (0..n)
        .map(|u| {
            let row = y.row(u);
            let mut p = [0.0; 2];
            for (axis, comp) in [&first, &second].into_iter().enumerate() {
                p[axis] = row.iter().zip(&mean).zip(comp).map(|((x, m), c)| (x - m) * c).sum();
            }
            p
        })
        .collect();
    let extents = Extents::of(points.iter().copied()).expect("n >= 2");

    Ok(Projection2D {
        mean,
        components: [first, second],
        variances: [var1, var2],
        points,
        extents,
    })
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Cyclic Jacobi eigen-decomposition of a symmetric row-major `d × d` matrix.
///
/// Destroys `a`. Returns eigenvalues and a row-major matrix whose columns are
/// the corresponding unit eigenvectors.
fn symmetric_eigen(a: &mut [f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return (vec![0.0; d], v);
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..d {
            for q in p + 1..d {
                off += a[p * d + q] * a[p * d + q];
            }
        }
        if off <= total * 1e-30 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..d).map(|i| a[i * d + i]).collect();
    (values, v)
}
