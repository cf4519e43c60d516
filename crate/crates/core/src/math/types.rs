use serde::{Deserialize, Serialize};

use crate::error::{DiiError, Result};

/// Dense `N x D` table of finite features, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n_points: usize,
    n_features: usize,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Requires `N >= 2`, `D >= 1` and
    /// finite entries.
    pub fn new(values: Vec<f64>, n_points: usize, n_features: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(DiiError::InvalidArgument(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        if n_features < 1 {
            return Err(DiiError::InvalidArgument("need at least 1 feature".into()));
        }
        if values.len() != n_points * n_features {
            return Err(DiiError::ShapeMismatch(format!(
                "{} values for a {n_points}x{n_features} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(DiiError::NonFinite {
                row: pos / n_features,
                col: pos % n_features,
            });
        }
        Ok(Self {
            values,
            n_points,
            n_features,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(DiiError::ShapeMismatch("ragged rows".into()));
        }
        let values = rows.iter().flatten().copied().collect();
        Self::new(values, rows.len(), n_features)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn get(&self, i: usize, alpha: usize) -> f64 {
        self.values[i * self.n_features + alpha]
    }

    pub fn column(&self, alpha: usize) -> Vec<f64> {
        (0..self.n_points).map(|i| self.get(i, alpha)).collect()
    }

    /// New matrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * self.n_features);
        for &i in rows {
            if i >= self.n_points {
                return Err(DiiError::InvalidArgument(format!(
                    "row {i} out of range for {} points",
                    self.n_points
                )));
            }
            values.extend_from_slice(self.row(i));
        }
        Self::new(values, rows.len(), self.n_features)
    }

    /// New matrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&c) = cols.iter().find(|&&c| c >= self.n_features) {
            return Err(DiiError::InvalidArgument(format!(
                "column {c} out of range for {} features",
                self.n_features
            )));
        }
        let mut values = Vec::with_capacity(cols.len() * self.n_points);
        for i in 0..self.n_points {
            let row = self.row(i);
            values.extend(cols.iter().map(|&c| row[c]));
        }
        Self::new(values, self.n_points, cols.len())
    }

    /// Per-feature mean and population standard deviation.
    pub fn column_moments(&self) -> Vec<(f64, f64)> {
        let n = self.n_points as f64;
        (0..self.n_features)
            .map(|alpha| {
                let mean = (0..self.n_points).map(|i| self.get(i, alpha)).sum::<f64>() / n;
                let var = (0..self.n_points)
                    .map(|i| (self.get(i, alpha) - mean).powi(2))
                    .sum::<f64>()
                    / n;
                (mean, var.sqrt())
            })
            .collect()
    }
}

/// Nonnegative per-feature scaling factors defining the weighted metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Rejects negative or non-finite components.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some(pos) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(DiiError::InvalidArgument(format!(
                "weight {pos} must be finite and nonnegative, got {}",
                w[pos]
            )));
        }
        Ok(Self(w))
    }

    pub fn ones(d: usize) -> Self {
        Self(vec![1.0; d])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Number of strictly positive components.
    pub fn n_nonzero(&self) -> usize {
        self.0.iter().filter(|&&v| v > 0.0).count()
    }

    /// Indices of the strictly positive components.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&a| self.0[a] > 0.0).collect()
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * c).collect())
    }

    /// Copy with the given components set to zero.
    pub fn masked(&self, keep: &[bool]) -> Self {
        Self(
            self.0
                .iter()
                .zip(keep)
                .map(|(&v, &k)| if k { v } else { 0.0 })
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Validates a list of point indices: nonempty, in range, pairwise distinct.
pub(crate) fn check_row_ids(row_ids: &[usize], n_points: usize) -> Result<()> {
    if row_ids.is_empty() {
        return Err(DiiError::InvalidArgument("row selection is empty".into()));
    }
    let mut seen = vec![false; n_points];
    for &i in row_ids {
        if i >= n_points {
            return Err(DiiError::InvalidArgument(format!(
                "row {i} out of range for {n_points} points"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(DiiError::InvalidArgument(format!("row {i} selected twice")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_with_location() {
        let err = DataMatrix::new(vec![0.0, 1.0, f64::NAN, 2.0], 2, 2).unwrap_err();
        assert!(matches!(err, DiiError::NonFinite { row: 1, col: 0 }));
    }

    #[test]
    fn rejects_single_point() {
        assert!(DataMatrix::new(vec![1.0, 2.0], 1, 2).is_err());
    }

    #[test]
    fn moments_use_population_std() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![4.0]]).unwrap();
        assert_eq!(x.column_moments(), vec![(2.0, 2.0)]);
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(WeightVector::new(vec![1.0, -0.1]).is_err());
        assert_eq!(WeightVector::new(vec![0.0, 2.0, 0.5]).unwrap().support(), vec![1, 2]);
    }

    #[test]
    fn row_ids_validation() {
        assert!(check_row_ids(&[0, 2], 3).is_ok());
        assert!(check_row_ids(&[], 3).is_err());
        assert!(check_row_ids(&[3], 3).is_err());
        assert!(check_row_ids(&[1, 1], 3).is_err());
    }
}
