use rayon::prelude::*;

use super::distance::{compute_distances, DistanceMatrix};
use super::types::DataMatrix;
use crate::error::Result;

/// Nearest-neighbor ranks `r[i][j]` in `1..=N-1`, with `r[i][i] = 0`.
///
/// Shares the rectangular layout of [`DistanceMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    r: Vec<u32>,
    row_ids: Vec<usize>,
    n_cols: usize,
}

impl RankMatrix {
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
    pub fn row(&self, k: usize) -> &[u32] {
        &self.r[k * self.n_cols..(k + 1) * self.n_cols]
    }

    pub fn get(&self, k: usize, j: usize) -> u32 {
        self.r[k * self.n_cols + j]
    }

    /// Keeps the anchor rows at the given positions (not point ids).
    pub fn select_rows(&self, positions: &[usize]) -> Self {
        let mut r = Vec::with_capacity(positions.len() * self.n_cols);
        for &k in positions {
            r.extend_from_slice(self.row(k));
        }
        Self {
            r,
            row_ids: positions.iter().map(|&k| self.row_ids[k]).collect(),
            n_cols: self.n_cols,
        }
    }

    /// Ranks of the ground-truth space: plain Euclidean distances between the
    /// rows of `data_b`, seen from the anchors `row_ids`.
    pub fn from_ground_truth(data_b: &DataMatrix, row_ids: &[usize]) -> Result<Self> {
        Ok(compute_ranks(&compute_distances(data_b, row_ids)?))
    }

    /// Builds a rank matrix from raw rows. Used for synthetic rank spaces.
    ///
    /// Each row must be a permutation of `1..=N-1` with a zero on the
    /// anchor's own column.
    pub fn from_raw(r: Vec<u32>, row_ids: Vec<usize>, n_cols: usize) -> Result<Self> {
        super::types::check_row_ids(&row_ids, n_cols)?;
        if r.len() != row_ids.len() * n_cols {
            return Err(crate::DiiError::ShapeMismatch(format!(
                "{} ranks for {} rows x {n_cols} columns",
                r.len(),
                row_ids.len()
            )));
        }
        let m = Self { r, row_ids, n_cols };
        for k in 0..m.n_rows() {
            if m.get(k, m.row_ids[k]) != 0 || !is_rank_permutation(m.row(k), m.row_ids[k]) {
                return Err(crate::DiiError::InvalidArgument(format!(
                    "rank row {k} is not a permutation of 1..N-1"
                )));
            }
        }
        Ok(m)
    }
}

/// True when the row, excluding `self_col`, is a permutation of `1..=N-1`.
pub fn is_rank_permutation(row: &[u32], self_col: usize) -> bool {
    let n = row.len();
    let mut seen = vec![false; n];
    for (j, &r) in row.iter().enumerate() {
        if j == self_col {
            continue;
        }
        let r = r as usize;
        if r == 0 || r >= n || std::mem::replace(&mut seen[r], true) {
            return false;
        }
    }
    true
}

/// Ranks each anchor row by ascending distance, excluding the anchor itself.
///
/// Equal distances are ordered by ascending point index.
pub fn compute_ranks(d: &DistanceMatrix) -> RankMatrix {
    let n = d.n_cols();
    let mut r = vec![0u32; d.n_rows() * n];
    r.par_chunks_mut(n)
        .enumerate()
        .for_each(|(k, out)| {
            let i = d.row_ids()[k];
            let row = d.row(k);
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            // stable: ties keep ascending index order
            order.sort_by(|&a, &b| row[a].total_cmp(&row[b]));
            for (pos, j) in order.into_iter().enumerate() {
                out[j] = (pos + 1) as u32;
            }
        });
    RankMatrix {
        r,
        row_ids: d.row_ids().to_vec(),
        n_cols: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::distance::all_rows;

    fn ranks_1d(points: &[f64]) -> RankMatrix {
        let x = DataMatrix::from_rows(&points.iter().map(|&p| vec![p]).collect::<Vec<_>>())
            .unwrap();
        RankMatrix::from_ground_truth(&x, &all_rows(points.len())).unwrap()
    }

    #[test]
    fn one_dimensional_ranks() {
        let r = ranks_1d(&[0.0, 1.0, 10.0]);
        assert_eq!(r.row(0), &[0, 1, 2]);
        assert_eq!(r.row(2), &[2, 1, 0]);
    }

    #[test]
    fn duplicate_point_is_rank_one() {
        let r = ranks_1d(&[5.0, 0.0, 5.0, 4.0]);
        assert_eq!(r.get(0, 2), 1);
        assert_eq!(r.get(2, 0), 1);
        assert_eq!(r.row(0), &[0, 3, 1, 2]);
    }

    #[test]
    fn ties_broken_by_index() {
        // point 0 sits between 1 and 2 at equal distance
        let r = ranks_1d(&[0.0, -1.0, 1.0]);
        assert_eq!(r.row(0), &[0, 1, 2]);
    }

    #[test]
    fn rows_are_permutations() {
        let r = ranks_1d(&[0.3, 1.0, 1.0, 2.5, -4.0, 0.3]);
        for k in 0..r.n_rows() {
            assert!(is_rank_permutation(r.row(k), k));
        }
    }

    #[test]
    fn from_raw_validates() {
        assert!(RankMatrix::from_raw(vec![0, 1, 2], vec![0], 3).is_ok());
        assert!(RankMatrix::from_raw(vec![0, 1, 1], vec![0], 3).is_err());
        assert!(RankMatrix::from_raw(vec![1, 0, 2], vec![0], 3).is_err());
    }
}
