use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distance::DistanceMatrix;
use crate::error::{DiiError, Result};

/// Softmax weights `c[i][j]` over the non-self neighbors of each anchor row.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxCoefficients {
    c: Vec<f64>,
    row_ids: Vec<usize>,
    n_cols: usize,
    lambda: f64,
}

impl SoftmaxCoefficients {
    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.c[k * self.n_cols..(k + 1) * self.n_cols]
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.c[k * self.n_cols + j]
    }
}

/// How the softmax scale is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMode {
    /// Recomputed from the current distances with [`adaptive_lambda`].
    Adaptive,
    Fixed(f64),
}

impl LambdaMode {
    pub fn resolve(&self, d: &DistanceMatrix) -> Result<f64> {
        match *self {
            LambdaMode::Adaptive => adaptive_lambda(d),
            LambdaMode::Fixed(l) if l > 0.0 && l.is_finite() => Ok(l),
            LambdaMode::Fixed(l) => Err(DiiError::InvalidLambda(l)),
        }
    }
}

impl std::str::FromStr for LambdaMode {
    type Err = DiiError;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("adaptive") {
            return Ok(LambdaMode::Adaptive);
        }
        let l: f64 = s
            .parse()
            .map_err(|_| DiiError::InvalidArgument(format!("bad lambda '{s}'")))?;
        if !(l > 0.0 && l.is_finite()) {
            return Err(DiiError::InvalidLambda(l));
        }
        Ok(LambdaMode::Fixed(l))
    }
}

/// `c[i][j] = exp(-d[i][j]/λ) / Σ_{m≠i} exp(-d[i][m]/λ)`, with `c[i][i] = 0`.
///
/// Each row is shifted by its smallest non-self distance before
/// exponentiating, so the largest term is exactly one and small `λ` cannot
/// underflow the normalizer.
pub fn softmax_coefficients(d: &DistanceMatrix, lambda: f64) -> Result<SoftmaxCoefficients> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(DiiError::InvalidLambda(lambda));
    }
    if d.n_cols() < 2 {
        return Err(DiiError::InvalidArgument("need at least 2 points".into()));
    }
    let n = d.n_cols();
    let mut c = vec![0.0; d.n_rows() * n];
    c.par_chunks_mut(n).enumerate().for_each(|(k, out)| {
        let i = d.row_ids()[k];
        let row = d.row(k);
        let shift = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min);
        let mut z = 0.0;
        for (j, (slot, &dij)) in out.iter_mut().zip(row).enumerate() {
            if j != i {
                let e = (-(dij - shift) / lambda).exp();
                *slot = e;
                z += e;
            }
        }
        let inv = 1.0 / z;
        for slot in out.iter_mut() {
            *slot *= inv;
        }
        out[i] = 0.0;
    });
    Ok(SoftmaxCoefficients {
        c,
        row_ids: d.row_ids().to_vec(),
        n_cols: n,
        lambda,
    })
}

/// Below this multiple of the mean pairwise distance the adaptive scale is
/// clamped.
pub const LAMBDA_FLOOR_FACTOR: f64 = 1e-12;

/// Adaptive softmax scale: `(min_i g_i + mean_i g_i) / 2`, where `g_i` is the
/// gap between the second and first neighbor distances of anchor `i`.
///
/// Scales linearly with the distances. Fails when every gap is zero; clamps
/// (with a warning) when the result is below `1e-12` times the mean pairwise
/// distance.
pub fn adaptive_lambda(d: &DistanceMatrix) -> Result<f64> {
    if d.n_cols() < 3 {
        return Err(DiiError::InvalidArgument(
            "adaptive lambda needs at least 3 points".into(),
        ));
    }
    let gaps: Vec<f64> = (0..d.n_rows())
        .map(|k| {
            let i = d.row_ids()[k];
            let (mut first, mut second) = (f64::INFINITY, f64::INFINITY);
            for (j, &v) in d.row(k).iter().enumerate() {
                if j == i {
                    continue;
                }
                if v < first {
                    second = first;
                    first = v;
                } else if v < second {
                    second = v;
                }
            }
            second - first
        })
        .collect();
    if gaps.iter().all(|&g| g == 0.0) {
        return Err(DiiError::DegenerateNeighborhoods);
    }
    let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let lambda = 0.5 * (min + mean);
    let floor = LAMBDA_FLOOR_FACTOR * d.mean_offdiagonal();
    if lambda < floor {
        log::warn!("adaptive lambda {lambda:e} below floor {floor:e}; clamping");
        return Ok(floor);
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::distance::{all_rows, compute_distances};
    use crate::math::types::DataMatrix;

    fn line(points: &[f64]) -> DistanceMatrix {
        let x = DataMatrix::from_rows(&points.iter().map(|&p| vec![p]).collect::<Vec<_>>())
            .unwrap();
        compute_distances(&x, &all_rows(points.len())).unwrap()
    }

    #[test]
    fn symmetric_row_splits_evenly() {
        let d = line(&[0.0, -1.0, 1.0]);
        for lambda in [1e-3, 0.7, 50.0] {
            let c = softmax_coefficients(&d, lambda).unwrap();
            assert_eq!(c.row(0), &[0.0, 0.5, 0.5]);
        }
    }

    #[test]
    fn hand_evaluated_row() {
        // row 0 distances (0.1, 0.2, 0.4), lambda 0.1
        let d = DistanceMatrix::from_values(
            vec![0.0, 0.1, 0.2, 0.4],
            vec![0],
            4,
        )
        .unwrap();
        let c = softmax_coefficients(&d, 0.1).unwrap();
        let e = [(-1.0f64).exp(), (-2.0f64).exp(), (-4.0f64).exp()];
        let z: f64 = e.iter().sum();
        for (j, ej) in e.iter().enumerate() {
            assert!((c.get(0, j + 1) - ej / z).abs() < 1e-14);
        }
        assert!((c.get(0, 1) - 0.7054).abs() < 5e-5);
        assert!((c.get(0, 2) - 0.2595).abs() < 5e-5);
        assert!((c.get(0, 3) - 0.0351).abs() < 5e-5);
    }

    #[test]
    fn tiny_lambda_picks_nearest() {
        let d = line(&[0.0, 1.0, 3.0, 7.0]);
        let c = softmax_coefficients(&d, 1e-6).unwrap();
        assert_eq!(c.row(0), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(c.row(3), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn rows_sum_to_one() {
        let d = line(&[0.0, 0.2, 0.9, 4.0, 4.1, -2.0]);
        let c = softmax_coefficients(&d, 0.3).unwrap();
        for k in 0..c.n_rows() {
            assert!((c.row(k).iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert_eq!(c.get(k, k), 0.0);
        }
    }

    #[test]
    fn non_positive_lambda_rejected() {
        let d = line(&[0.0, 1.0, 2.0]);
        assert!(matches!(
            softmax_coefficients(&d, 0.0),
            Err(DiiError::InvalidLambda(_))
        ));
        assert!(softmax_coefficients(&d, -1.0).is_err());
    }

    #[test]
    fn adaptive_lambda_hand_values() {
        // neighbor gaps per point: 0 -> 3-1, 1 -> 2-1, 3 -> 3-2, 7 -> 6-4
        // so (2, 1, 1, 2): min 1, mean 1.5
        assert_eq!(adaptive_lambda(&line(&[0.0, 1.0, 3.0, 7.0])).unwrap(), 1.25);
        // the middle point has two neighbors at distance 1: gaps (1, 0, 1)
        let l = adaptive_lambda(&line(&[0.0, 1.0, 2.0])).unwrap();
        assert!((l - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_lambda_scales_linearly() {
        let base = adaptive_lambda(&line(&[0.0, 1.0, 3.0, 7.0])).unwrap();
        let scaled = adaptive_lambda(&line(&[0.0, 2.5, 7.5, 17.5])).unwrap();
        assert!((scaled - 2.5 * base).abs() < 1e-12);
    }

    #[test]
    fn adaptive_lambda_degenerate() {
        // every point has two equidistant neighbors
        let d = line(&[0.0, 0.0, 0.0]);
        assert!(matches!(
            adaptive_lambda(&d),
            Err(DiiError::DegenerateNeighborhoods)
        ));
    }

    #[test]
    fn lambda_mode_parsing() {
        assert_eq!("adaptive".parse::<LambdaMode>().unwrap(), LambdaMode::Adaptive);
        assert_eq!("0.5".parse::<LambdaMode>().unwrap(), LambdaMode::Fixed(0.5));
        assert!("-1".parse::<LambdaMode>().is_err());
        assert!("abc".parse::<LambdaMode>().is_err());
    }
}
