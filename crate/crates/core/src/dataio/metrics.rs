use crate::error::{DiiError, Result};
use crate::math::DataMatrix;

/// `a·b / (|a| |b|)`. Errors on length mismatch or a zero vector.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(DiiError::ShapeMismatch(format!(
            "cosine similarity of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(DiiError::InvalidArgument(
            "cosine similarity of a zero vector".into(),
        ));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Rescales `w` so its largest component equals `target_max`.
pub fn rescale_to_max(w: &[f64], target_max: f64) -> Vec<f64> {
    let m = w.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return w.to_vec();
    }
    w.iter().map(|v| v * target_max / m).collect()
}

/// Per-feature `(mean, std)` used by [`standardize`].
pub type Moments = Vec<(f64, f64)>;

/// Zero mean, unit population std per feature. Constant features become all
/// zeros and are reported with a warning.
pub fn standardize(data: &DataMatrix) -> (DataMatrix, Moments) {
    let moments = data.column_moments();
    let d = data.n_features();
    let mut values = data.values().to_vec();
    for (alpha, &(mean, std)) in moments.iter().enumerate() {
        if std == 0.0 {
            log::warn!("feature {alpha} is constant; standardized to zeros");
        }
        for i in 0..data.n_points() {
            let v = &mut values[i * d + alpha];
            *v = if std == 0.0 { 0.0 } else { (*v - mean) / std };
        }
    }
    let out = DataMatrix::new(values, data.n_points(), d).expect("same shape, finite values");
    (out, moments)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_hand_values() {
        let c = cosine_similarity(&[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 3.0]).unwrap(), 0.0);
        let b = [0.3, 2.0, 5.0];
        let a: Vec<f64> = b.iter().map(|v| 4.2 * v).collect();
        assert!((cosine_similarity(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_rejects_zero_vector() {
        assert!(cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(cosine_similarity(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn standardize_output_moments() {
        let x = DataMatrix::from_rows(&[
            vec![1.0, 5.0, 3.0],
            vec![2.0, 5.0, -1.0],
            vec![4.0, 5.0, 0.5],
            vec![9.0, 5.0, 2.0],
        ])
        .unwrap();
        let (z, moments) = standardize(&x);
        assert_eq!(moments[1], (5.0, 0.0));
        for (alpha, (mean, std)) in z.column_moments().into_iter().enumerate() {
            assert!(mean.abs() < 1e-12);
            let expected = if alpha == 1 { 0.0 } else { 1.0 };
            assert!((std - expected).abs() < 1e-12);
        }
        assert!(z.column(1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn standardize_is_idempotent() {
        let x = DataMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let (z, _) = standardize(&x);
        for (a, b) in z.values().iter().zip(x.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rescale_matches_largest() {
        assert_eq!(rescale_to_max(&[1.0, 0.5, 0.0], 5.0), vec![5.0, 2.5, 0.0]);
    }
}
