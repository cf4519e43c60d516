use rayon::prelude::*;

use super::types::{check_row_ids, DataMatrix, WeightVector};
use crate::error::{DiiError, Result};

/// Weighted Euclidean distances from a set of anchor rows to every point.
///
/// Rectangular `N_rows x N`, row-major. Row `k` holds the distances from point
/// `row_ids[k]` to all `N` points, so the self-distance sits at column
/// `row_ids[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    d: Vec<f64>,
    row_ids: Vec<usize>,
    n_cols: usize,
}

impl DistanceMatrix {
    /// Builds a matrix from explicit values. Entries must be finite and
    /// nonnegative and every self-distance must be zero.
    pub fn from_values(d: Vec<f64>, row_ids: Vec<usize>, n_cols: usize) -> Result<Self> {
        check_row_ids(&row_ids, n_cols)?;
        if d.len() != row_ids.len() * n_cols {
            return Err(DiiError::ShapeMismatch(format!(
                "{} distances for {} rows x {n_cols} columns",
                d.len(),
                row_ids.len()
            )));
        }
        if let Some(pos) = d.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(DiiError::NonFinite {
                row: pos / n_cols,
                col: pos % n_cols,
            });
        }
        for (k, &i) in row_ids.iter().enumerate() {
            if d[k * n_cols + i] != 0.0 {
                return Err(DiiError::InvalidArgument(format!(
                    "self-distance of point {i} is not zero"
                )));
            }
        }
        Ok(Self { d, row_ids, n_cols })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.d[k * self.n_cols..(k + 1) * self.n_cols]
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.d[k * self.n_cols + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    /// Mean distance over all off-diagonal entries.
    pub fn mean_offdiagonal(&self) -> f64 {
        let total: f64 = self.d.iter().sum();
        total / (self.n_rows() * (self.n_cols - 1)) as f64
    }
}

/// Weighted features restricted to the active (nonzero-weight) columns.
///
/// Entry `(i, a)` is `w[active[a]] * X[i][active[a]]`.
pub(crate) struct ScaledData {
    pub values: Vec<f64>,
    pub active: Vec<usize>,
}

impl ScaledData {
    pub fn new(data: &DataMatrix, w: &WeightVector) -> Result<Self> {
        if w.len() != data.n_features() {
            return Err(DiiError::ShapeMismatch(format!(
                "{} weights for {} features",
                w.len(),
                data.n_features()
            )));
        }
        let active = w.support();
        if active.is_empty() {
            return Err(DiiError::DegenerateMetric);
        }
        let mut values = Vec::with_capacity(data.n_points() * active.len());
        for i in 0..data.n_points() {
            let row = data.row(i);
            values.extend(active.iter().map(|&a| w[a] * row[a]));
        }
        Ok(Self { values, active })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.active.len();
        &self.values[i * n..(i + 1) * n]
    }
}

#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Computes `d[i][j] = || w ⊙ (X_i - X_j) ||` for every selected row `i` and
/// every point `j`.
///
/// Features with zero weight are skipped, which is exact. Fails with
/// [`DiiError::DegenerateMetric`] when every weight is zero.
pub fn compute_weighted_distances(
    data: &DataMatrix,
    w: &WeightVector,
    row_ids: &[usize],
) -> Result<DistanceMatrix> {
    check_row_ids(row_ids, data.n_points())?;
    let scaled = ScaledData::new(data, w)?;
    let n = data.n_points();
    let mut d = vec![0.0; row_ids.len() * n];
    d.par_chunks_mut(n).zip(row_ids.par_iter()).for_each(|(out, &i)| {
        let xi = scaled.row(i);
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = if j == i {
                0.0
            } else {
                squared_euclidean(xi, scaled.row(j)).sqrt()
            };
        }
    });
    Ok(DistanceMatrix {
        d,
        row_ids: row_ids.to_vec(),
        n_cols: n,
    })
}

/// Plain Euclidean distances (all weights one).
pub fn compute_distances(data: &DataMatrix, row_ids: &[usize]) -> Result<DistanceMatrix> {
    compute_weighted_distances(data, &WeightVector::ones(data.n_features()), row_ids)
}

pub fn all_rows(n: usize) -> Vec<usize> {
    (0..n).collect()
}
