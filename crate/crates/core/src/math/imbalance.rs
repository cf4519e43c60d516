use rayon::prelude::*;

use super::distance::{compute_weighted_distances, DistanceMatrix};
use super::ranks::RankMatrix;
use super::softmax::SoftmaxCoefficients;
use super::types::{DataMatrix, WeightVector};
use crate::error::{DiiError, Result};

fn check_layout(
    what: &str,
    row_ids: &[usize],
    n_cols: usize,
    ranks_b: &RankMatrix,
) -> Result<()> {
    if row_ids != ranks_b.row_ids() || n_cols != ranks_b.n_cols() {
        return Err(DiiError::ShapeMismatch(format!(
            "{what} is {}x{n_cols}, ground-truth ranks are {}x{} (or row ids differ)",
            row_ids.len(),
            ranks_b.n_rows(),
            ranks_b.n_cols()
        )));
    }
    Ok(())
}

/// `2 / (N_rows * N)`.
#[inline]
fn prefactor(n_rows: usize, n_cols: usize) -> f64 {
    2.0 / (n_rows as f64 * n_cols as f64)
}

/// Classic information imbalance `Δ(A → B)`: mean ground-truth rank of each
/// anchor's nearest neighbor in `A`, scaled by `2 / (N_rows * N)`.
///
/// Uses the (tie-broken) rank-1 neighbor of `ranks_a`. See
/// [`classic_imbalance_from_distances`] for a tie-aware variant.
pub fn classic_imbalance(ranks_a: &RankMatrix, ranks_b: &RankMatrix) -> Result<f64> {
    check_layout("rank matrix A", ranks_a.row_ids(), ranks_a.n_cols(), ranks_b)?;
    let sum: u64 = (0..ranks_a.n_rows())
        .map(|k| {
            let j = ranks_a
                .row(k)
                .iter()
                .position(|&r| r == 1)
                .expect("rank rows contain a 1");
            ranks_b.get(k, j) as u64
        })
        .sum();
    Ok(prefactor(ranks_a.n_rows(), ranks_a.n_cols()) * sum as f64)
}

/// Classic imbalance where every neighbor tied at the smallest distance
/// counts, with their ground-truth ranks averaged per anchor.
pub fn classic_imbalance_from_distances(d_a: &DistanceMatrix, ranks_b: &RankMatrix) -> Result<f64> {
    check_layout("distance matrix A", d_a.row_ids(), d_a.n_cols(), ranks_b)?;
    let sum: f64 = (0..d_a.n_rows())
        .map(|k| {
            let i = d_a.row_ids()[k];
            let row = d_a.row(k);
            let nearest = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| v)
                .fold(f64::INFINITY, f64::min);
            let (mut total, mut count) = (0.0, 0usize);
            for (j, &v) in row.iter().enumerate() {
                if j != i && v == nearest {
                    total += ranks_b.get(k, j) as f64;
                    count += 1;
                }
            }
            total / count as f64
        })
        .sum();
    Ok(prefactor(d_a.n_rows(), d_a.n_cols()) * sum)
}

/// `DII = 2 / (N_rows * N) * Σ_i Σ_{j≠i} c[i][j] * r_B[i][j]`.
///
/// Row sums are formed independently and reduced in row order.
pub fn dii_value(c: &SoftmaxCoefficients, ranks_b: &RankMatrix) -> Result<f64> {
    check_layout("softmax coefficients", c.row_ids(), c.n_cols(), ranks_b)?;
    let row_sums: Vec<f64> = (0..c.n_rows())
        .into_par_iter()
        .map(|k| conditional_rank(c.row(k), ranks_b.row(k)))
        .collect();
    Ok(prefactor(c.n_rows(), c.n_cols()) * row_sums.iter().sum::<f64>())
}

/// Softmax-weighted mean ground-truth rank of one anchor.
#[inline]
fn conditional_rank(c: &[f64], r: &[u32]) -> f64 {
    c.iter().zip(r).map(|(&cij, &rij)| cij * rij as f64).sum()
}

/// Analytic derivative of the DII with respect to each weight, at fixed `λ`.
///
/// ```text
/// ∂DII/∂w_a = 2 w_a / (λ N_rows N) Σ_i Σ_{j≠i} c_ij r_ij
///             ( -q_ij + Σ_{m≠i} c_im q_im ),    q_ij = (X_ia - X_ja)² / d_ij
/// ```
///
/// Pairs at zero weighted distance contribute zero. Features with zero
/// weight get a zero derivative.
pub fn dii_gradient(
    data: &DataMatrix,
    w: &WeightVector,
    c: &SoftmaxCoefficients,
    ranks_b: &RankMatrix,
    lambda: f64,
) -> Result<Vec<f64>> {
    let d = compute_weighted_distances(data, w, c.row_ids())?;
    dii_gradient_with_distances(data, w, &d, c, ranks_b, lambda)
}

/// Same as [`dii_gradient`] but reuses distances already computed for `w`.
pub fn dii_gradient_with_distances(
    data: &DataMatrix,
    w: &WeightVector,
    d: &DistanceMatrix,
    c: &SoftmaxCoefficients,
    ranks_b: &RankMatrix,
    lambda: f64,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(DiiError::InvalidLambda(lambda));
    }
    if w.len() != data.n_features() {
        return Err(DiiError::ShapeMismatch(format!(
            "{} weights for {} features",
            w.len(),
            data.n_features()
        )));
    }
    check_layout("softmax coefficients", c.row_ids(), c.n_cols(), ranks_b)?;
    check_layout("distance matrix", d.row_ids(), d.n_cols(), ranks_b)?;
    if c.n_cols() != data.n_points() {
        return Err(DiiError::ShapeMismatch(format!(
            "coefficients have {} columns, data has {} points",
            c.n_cols(),
            data.n_points()
        )));
    }
    let active = w.support();
    if active.is_empty() {
        return Err(DiiError::DegenerateMetric);
    }
    let n_active = active.len();
    let raw: Vec<f64> = (0..data.n_points())
        .flat_map(|i| active.iter().map(move |&a| data.get(i, a)))
        .collect();
    let raw_row = |i: usize| &raw[i * n_active..(i + 1) * n_active];

    // Σ_j c_ij (R_i - r_ij) q_ij, with R_i the conditional rank of row i
    let partials: Vec<Vec<f64>> = (0..c.n_rows())
        .into_par_iter()
        .map(|k| {
            let i = c.row_ids()[k];
            let (crow, rrow, drow) = (c.row(k), ranks_b.row(k), d.row(k));
            let big_r = conditional_rank(crow, rrow);
            let xi = raw_row(i);
            let mut acc = vec![0.0; n_active];
            for j in 0..crow.len() {
                let dij = drow[j];
                if j == i || dij == 0.0 || crow[j] == 0.0 {
                    continue;
                }
                let g = crow[j] * (big_r - rrow[j] as f64) / dij;
                for (slot, (&a, &b)) in acc.iter_mut().zip(xi.iter().zip(raw_row(j))) {
                    let diff = a - b;
                    *slot += g * diff * diff;
                }
            }
            acc
        })
        .collect();

    let scale = prefactor(c.n_rows(), c.n_cols()) / lambda;
    let mut grad = vec![0.0; data.n_features()];
    for (slot, &a) in active.iter().enumerate() {
        let total: f64 = partials.iter().map(|p| p[slot]).sum();
        grad[a] = scale * w[a] * total;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::distance::{all_rows, compute_distances};
    use crate::math::ranks::compute_ranks;
    use crate::math::softmax::softmax_coefficients;

    fn data_1d(points: &[f64]) -> DataMatrix {
        DataMatrix::from_rows(&points.iter().map(|&p| vec![p]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identical_spaces_give_two_over_n() {
        let x = DataMatrix::from_rows(&[
            vec![0.0, 0.1],
            vec![1.0, 0.3],
            vec![3.5, -1.0],
            vec![7.0, 2.0],
            vec![-2.0, 0.7],
        ])
        .unwrap();
        let r = compute_ranks(&compute_distances(&x, &all_rows(5)).unwrap());
        let delta = classic_imbalance(&r, &r).unwrap();
        assert!((delta - 2.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_direct_sum() {
        // A nearest neighbors: 0->1, 1->0, 2->1; B ranks chosen so those are 1, 2, 2
        let ranks_a = RankMatrix::from_raw(
            vec![0, 1, 2, 1, 0, 2, 2, 1, 0],
            all_rows(3),
            3,
        )
        .unwrap();
        let ranks_b = RankMatrix::from_raw(
            vec![0, 1, 2, 2, 0, 1, 1, 2, 0],
            all_rows(3),
            3,
        )
        .unwrap();
        let delta = classic_imbalance(&ranks_a, &ranks_b).unwrap();
        assert!((delta - 2.0 / 9.0 * 5.0).abs() < 1e-15);
    }

    #[test]
    fn tied_nearest_neighbors_are_averaged() {
        // point 0 has neighbors 1 and 2 at equal distance
        let a = data_1d(&[0.0, -1.0, 1.0, 5.0]);
        let d = compute_distances(&a, &all_rows(4)).unwrap();
        let r = compute_ranks(&d);
        let tie_aware = classic_imbalance_from_distances(&d, &r).unwrap();
        // row 0 averages ranks 1 and 2 of its own ordering
        let expected = 2.0 / 16.0 * (1.5 + 1.0 + 1.0 + 1.0);
        assert!((tie_aware - expected).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let a = data_1d(&[0.0, 1.0, 3.0]);
        let r_full = compute_ranks(&compute_distances(&a, &all_rows(3)).unwrap());
        let r_sub = compute_ranks(&compute_distances(&a, &[0, 1]).unwrap());
        assert!(matches!(
            classic_imbalance(&r_full, &r_sub),
            Err(DiiError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn constant_feature_has_zero_gradient() {
        let x = DataMatrix::from_rows(&[
            vec![0.0, 2.0],
            vec![1.0, 2.0],
            vec![3.0, 2.0],
            vec![3.3, 2.0],
        ])
        .unwrap();
        let w = WeightVector::new(vec![1.0, 0.7]).unwrap();
        let rows = all_rows(4);
        let b = data_1d(&[0.0, 2.0, 1.0, 3.0]);
        let rb = RankMatrix::from_ground_truth(&b, &rows).unwrap();
        let d = compute_weighted_distances(&x, &w, &rows).unwrap();
        let c = softmax_coefficients(&d, 0.5).unwrap();
        let g = dii_gradient(&x, &w, &c, &rb, 0.5).unwrap();
        assert_eq!(g[1], 0.0);
        assert!(g[0] != 0.0);
    }

    #[test]
    fn zero_weight_has_zero_gradient() {
        let x = DataMatrix::from_rows(&[
            vec![0.0, 2.0],
            vec![1.0, -2.0],
            vec![3.0, 0.5],
            vec![3.3, 1.0],
        ])
        .unwrap();
        let w = WeightVector::new(vec![1.0, 0.0]).unwrap();
        let rows = all_rows(4);
        let rb = RankMatrix::from_ground_truth(&x, &rows).unwrap();
        let d = compute_weighted_distances(&x, &w, &rows).unwrap();
        let c = softmax_coefficients(&d, 0.5).unwrap();
        let g = dii_gradient(&x, &w, &c, &rb, 0.5).unwrap();
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn duplicate_points_do_not_produce_nan() {
        let x = data_1d(&[0.0, 0.0, 1.0, 2.5]);
        let w = WeightVector::ones(1);
        let rows = all_rows(4);
        let rb = RankMatrix::from_ground_truth(&data_1d(&[0.0, 1.0, 2.0, 3.0]), &rows).unwrap();
        let d = compute_weighted_distances(&x, &w, &rows).unwrap();
        let c = softmax_coefficients(&d, 0.4).unwrap();
        let g = dii_gradient(&x, &w, &c, &rb, 0.4).unwrap();
        assert!(g[0].is_finite());
    }
}
