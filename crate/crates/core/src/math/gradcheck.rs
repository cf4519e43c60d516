//! Finite-difference validation of the analytic DII gradient.
//!
//! The check differentiates [`dii_value`] numerically at a fixed softmax
//! scale, so it only shares the forward pass with the code under test.

use super::distance::compute_weighted_distances;
use super::imbalance::{dii_gradient, dii_value};
use super::ranks::RankMatrix;
use super::softmax::softmax_coefficients;
use super::types::{DataMatrix, WeightVector};
use crate::error::Result;

/// Signature of a gradient routine, so a deliberately broken one can be
/// checked too.
pub type GradientFn =
    fn(&DataMatrix, &WeightVector, &super::SoftmaxCoefficients, &RankMatrix, f64) -> Result<Vec<f64>>;

/// DII at fixed `λ` for arbitrary weights.
pub fn dii_at(
    data: &DataMatrix,
    w: &WeightVector,
    ranks_b: &RankMatrix,
    lambda: f64,
) -> Result<f64> {
    let d = compute_weighted_distances(data, w, ranks_b.row_ids())?;
    dii_value(&softmax_coefficients(&d, lambda)?, ranks_b)
}

/// Central finite differences with step `rel_step * |w_a|` per component.
/// Zero weights get a zero derivative.
pub fn finite_difference_gradient(
    data: &DataMatrix,
    w: &WeightVector,
    ranks_b: &RankMatrix,
    lambda: f64,
    rel_step: f64,
) -> Result<Vec<f64>> {
    let base = w.as_slice().to_vec();
    (0..base.len())
        .map(|a| {
            if base[a] == 0.0 {
                return Ok(0.0);
            }
            let h = rel_step * base[a].abs();
            let mut plus = base.clone();
            plus[a] += h;
            let mut minus = base.clone();
            minus[a] -= h;
            let fp = dii_at(data, &WeightVector::new(plus)?, ranks_b, lambda)?;
            let fm = dii_at(data, &WeightVector::new(minus)?, ranks_b, lambda)?;
            Ok((fp - fm) / (2.0 * h))
        })
        .collect()
}

/// Outcome of comparing an analytic gradient against finite differences.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GradCheckReport {
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
    /// `|a - n| / max(|a|, |n|)` per component; zero when both are below
    /// `abs_floor`.
    pub rel_errors: Vec<f64>,
    pub max_rel_error: f64,
}

/// Absolute magnitude under which both derivatives are treated as zero.
pub const GRADCHECK_ABS_FLOOR: f64 = 1e-12;

pub fn relative_errors(analytic: &[f64], numeric: &[f64]) -> Vec<f64> {
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| {
            let scale = a.abs().max(n.abs());
            if scale < GRADCHECK_ABS_FLOOR {
                0.0
            } else {
                (a - n).abs() / scale
            }
        })
        .collect()
}

/// Compares `grad_fn` to central differences with step `1e-6 |w_a|`.
pub fn check_gradient_with(
    grad_fn: GradientFn,
    data: &DataMatrix,
    w: &WeightVector,
    ranks_b: &RankMatrix,
    lambda: f64,
) -> Result<GradCheckReport> {
    let d = compute_weighted_distances(data, w, ranks_b.row_ids())?;
    let c = softmax_coefficients(&d, lambda)?;
    let analytic = grad_fn(data, w, &c, ranks_b, lambda)?;
    let numeric = finite_difference_gradient(data, w, ranks_b, lambda, 1e-6)?;
    let rel_errors = relative_errors(&analytic, &numeric);
    let max_rel_error = rel_errors.iter().copied().fold(0.0, f64::max);
    Ok(GradCheckReport {
        analytic,
        numeric,
        rel_errors,
        max_rel_error,
    })
}

/// A random test problem: Gaussian features, ground truth made of the
/// first `ceil(D/2)` features, weights uniform in `[0.5, 2]`, and the
/// adaptive scale at those weights.
#[derive(Debug, Clone)]
pub struct GradCheckInstance {
    pub data: DataMatrix,
    pub weights: WeightVector,
    pub ranks_b: RankMatrix,
    pub lambda: f64,
}

impl GradCheckInstance {
    pub fn random(n_points: usize, n_features: usize, rng: &mut impl rand::Rng) -> Result<Self> {
        use rand_distr::{Distribution, StandardNormal};
        let values = (0..n_points * n_features)
            .map(|_| StandardNormal.sample(rng))
            .collect();
        let data = DataMatrix::new(values, n_points, n_features)?;
        let gt_cols: Vec<usize> = (0..n_features.div_ceil(2)).collect();
        let rows = super::all_rows(n_points);
        let ranks_b = RankMatrix::from_ground_truth(&data.select_columns(&gt_cols)?, &rows)?;
        let weights = WeightVector::new((0..n_features).map(|_| rng.gen_range(0.5..2.0)).collect())?;
        let lambda = super::adaptive_lambda(&compute_weighted_distances(&data, &weights, &rows)?)?;
        Ok(Self {
            data,
            weights,
            ranks_b,
            lambda,
        })
    }

    pub fn check(&self, grad_fn: GradientFn) -> Result<GradCheckReport> {
        check_gradient_with(grad_fn, &self.data, &self.weights, &self.ranks_b, self.lambda)
    }
}

pub fn check_gradient(
    data: &DataMatrix,
    w: &WeightVector,
    ranks_b: &RankMatrix,
    lambda: f64,
) -> Result<GradCheckReport> {
    check_gradient_with(dii_gradient, data, w, ranks_b, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::distance::all_rows;

    #[test]
    fn small_instance_matches() {
        let x = DataMatrix::from_rows(&[
            vec![0.0, 1.0, 0.3],
            vec![0.5, -1.0, 2.0],
            vec![1.5, 0.2, -0.7],
            vec![-0.4, 0.9, 1.1],
            vec![2.2, -0.3, 0.0],
            vec![0.9, 0.4, 0.6],
        ])
        .unwrap();
        let b = x.select_columns(&[0, 2]).unwrap();
        let rb = RankMatrix::from_ground_truth(&b, &all_rows(6)).unwrap();
        let w = WeightVector::new(vec![1.0, 0.8, 1.3]).unwrap();
        let report = check_gradient(&x, &w, &rb, 0.4).unwrap();
        assert!(report.max_rel_error < 1e-5, "{report:?}");
    }
}
