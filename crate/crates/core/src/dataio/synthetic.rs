//! Synthetic benchmarks with known ground-truth weights.
//!
//! * Gaussian: `N` i.i.d. standard normal features; the ground-truth space is
//!   the same features scaled by `w_GT`.
//! * Monomial: every product of 1 to 3 base Gaussians (with repetition) as
//!   input features; the ground truth is a weighted handful of them.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{DatasetBundle, GroundTruth};
use crate::error::{DiiError, Result};
use crate::math::{DataMatrix, WeightVector};
use crate::rng::{stream_rng, Stream};

/// Default ground-truth weights of the 10-Gaussian benchmark.
pub const GAUSSIAN_GT_WEIGHTS: [f64; 10] = [5.0, 2.0, 1.0, 1.0, 0.5, 1e-4, 1e-4, 1e-4, 1e-4, 1e-4];

/// Default ground truth of the monomial benchmark, strongest first.
pub const MONOMIAL_GT: [(&str, f64); 10] = [
    ("X5", 10.0),
    ("X1*X5*X6", 7.0),
    ("X3", 6.0),
    ("X2^2", 5.0),
    ("X6", 5.0),
    ("X10", 4.0),
    ("X1*X2", 3.0),
    ("X8*X10^2", 2.0),
    ("X8", 1.0),
    ("X5*X8", 1.0),
];

fn standard_normal_matrix(n: usize, d: usize, seed: u64) -> Result<DataMatrix> {
    let mut rng = stream_rng(seed, Stream::Data);
    let values = (0..n * d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    DataMatrix::new(values, n, d)
}

fn base_names(d: usize) -> Vec<String> {
    (1..=d).map(|k| format!("X{k}")).collect()
}

/// `n` points of `gt_weights.len()` i.i.d. standard normals; the ground
/// truth is `w_GT ⊙ X`.
pub fn gen_gaussian_benchmark(n: usize, gt_weights: &[f64], seed: u64) -> Result<DatasetBundle> {
    let d = gt_weights.len();
    let w = WeightVector::new(gt_weights.to_vec())?;
    let x = standard_normal_matrix(n, d, seed)?;
    let scaled: Vec<f64> = (0..n)
        .flat_map(|i| x.row(i).iter().zip(gt_weights).map(|(v, w)| v * w).collect::<Vec<_>>())
        .collect();
    let b = DataMatrix::new(scaled, n, d)?;
    Ok(DatasetBundle {
        features: x,
        ground_truth: Some(GroundTruth::Data(b)),
        feature_names: base_names(d),
        gt_names: (1..=d).map(|k| format!("B{k}")).collect(),
        gt_weights: Some(w),
        seed: Some(seed),
    })
}

/// A product of base features, stored as its sorted 0-based factor list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn new(mut factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(DiiError::InvalidArgument("empty monomial".into()));
        }
        factors.sort_unstable();
        Ok(Self(factors))
    }

    pub fn factors(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Exponent vector over `base_d` variables.
    pub fn exponents(&self, base_d: usize) -> Vec<u32> {
        let mut e = vec![0; base_d];
        for &f in &self.0 {
            e[f] += 1;
        }
        e
    }

    pub fn eval(&self, row: &[f64]) -> f64 {
        self.0.iter().map(|&f| row[f]).product()
    }

    /// Names like `X1*X5*X6`, `X2^2`, `X8*X10^2` (1-based variables).
    pub fn name(&self) -> String {
        let mut parts = Vec::new();
        let mut k = 0;
        while k < self.0.len() {
            let f = self.0[k];
            let run = self.0[k..].iter().take_while(|&&g| g == f).count();
            parts.push(if run == 1 {
                format!("X{}", f + 1)
            } else {
                format!("X{}^{run}", f + 1)
            });
            k += run;
        }
        parts.join("*")
    }

    pub fn parse(name: &str) -> Result<Self> {
        let bad = || DiiError::InvalidArgument(format!("bad monomial name '{name}'"));
        let mut factors = Vec::new();
        for part in name.split('*') {
            let part = part.trim();
            let body = part.strip_prefix('X').ok_or_else(bad)?;
            let (var, pow) = match body.split_once('^') {
                Some((v, p)) => (v, p.parse::<usize>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let var: usize = var.parse().map_err(|_| bad())?;
            if var == 0 || pow == 0 {
                return Err(bad());
            }
            factors.extend(std::iter::repeat(var - 1).take(pow));
        }
        Self::new(factors)
    }
}

/// All monomials of degree `1..=max_order` in `base_d` variables, graded,
/// lexicographic within each degree (`X1^2, X1*X2, ..., X10^2`).
pub fn enumerate_monomials(base_d: usize, max_order: usize) -> Vec<Monomial> {
    fn extend(start: usize, base_d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial(cur.clone()));
            return;
        }
        for f in start..base_d {
            cur.push(f);
            extend(f, base_d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for degree in 1..=max_order {
        extend(0, base_d, degree, &mut Vec::new(), &mut out);
    }
    out
}

/// Monomial benchmark: inputs are all monomials of the base Gaussians up to
/// `max_order`; the ground truth holds the listed monomials scaled by their
/// weights. `gt_weights` in the bundle spans all input features, zero off the
/// support.
pub fn gen_monomial_benchmark(
    n: usize,
    base_d: usize,
    max_order: usize,
    ground_truth: &[(Monomial, f64)],
    seed: u64,
) -> Result<DatasetBundle> {
    let monomials = enumerate_monomials(base_d, max_order);
    let mut support = Vec::with_capacity(ground_truth.len());
    for (m, w) in ground_truth {
        let idx = monomials.iter().position(|x| x == m).ok_or_else(|| {
            DiiError::InvalidArgument(format!(
                "ground-truth monomial {} is not among the {} inputs",
                m.name(),
                monomials.len()
            ))
        })?;
        if !(*w >= 0.0 && w.is_finite()) {
            return Err(DiiError::InvalidArgument(format!(
                "ground-truth weight {w} of {} must be nonnegative",
                m.name()
            )));
        }
        support.push(idx);
    }

    let base = standard_normal_matrix(n, base_d, seed)?;
    let mut a = Vec::with_capacity(n * monomials.len());
    let mut b = Vec::with_capacity(n * ground_truth.len());
    for i in 0..n {
        let row = base.row(i);
        a.extend(monomials.iter().map(|m| m.eval(row)));
        b.extend(ground_truth.iter().map(|(m, w)| w * m.eval(row)));
    }
    let mut gt_full = vec![0.0; monomials.len()];
    for (&idx, (_, w)) in support.iter().zip(ground_truth) {
        gt_full[idx] = *w;
    }
    Ok(DatasetBundle {
        features: DataMatrix::new(a, n, monomials.len())?,
        ground_truth: Some(GroundTruth::Data(DataMatrix::new(b, n, ground_truth.len())?)),
        feature_names: monomials.iter().map(Monomial::name).collect(),
        gt_names: ground_truth.iter().map(|(m, _)| format!("gt_{}", m.name())).collect(),
        gt_weights: Some(WeightVector::new(gt_full)?),
        seed: Some(seed),
    })
}

/// The default ten-monomial ground truth, parsed.
pub fn default_monomial_ground_truth() -> Vec<(Monomial, f64)> {
    MONOMIAL_GT
        .iter()
        .map(|&(name, w)| (Monomial::parse(name).expect("valid constant"), w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn monomial_counts_per_degree() {
        let all = enumerate_monomials(10, 3);
        assert_eq!(all.len(), 285);
        for degree in 1..=3 {
            let count = all.iter().filter(|m| m.degree() == degree).count();
            // combinations with repetition C(d + k - 1, k)
            assert_eq!(count, binomial(10 + degree - 1, degree));
        }
        assert_eq!(
            [10, 55, 220],
            [1, 2, 3].map(|k| all.iter().filter(|m| m.degree() == k).count())
        );
    }

    #[test]
    fn graded_lex_order() {
        let names: Vec<String> = enumerate_monomials(3, 2).iter().map(Monomial::name).collect();
        assert_eq!(
            names,
            ["X1", "X2", "X3", "X1^2", "X1*X2", "X1*X3", "X2^2", "X2*X3", "X3^2"]
        );
    }

    #[test]
    fn names_round_trip() {
        for m in enumerate_monomials(10, 3) {
            assert_eq!(Monomial::parse(&m.name()).unwrap(), m);
        }
        assert_eq!(Monomial::parse("X8*X10^2").unwrap().factors(), &[7, 9, 9]);
        assert!(Monomial::parse("Y1").is_err());
        assert!(Monomial::parse("X0").is_err());
    }

    #[test]
    fn gaussian_defaults() {
        let b = gen_gaussian_benchmark(1500, &GAUSSIAN_GT_WEIGHTS, 3).unwrap();
        assert_eq!(b.gt_weights.as_ref().unwrap().as_slice(), &GAUSSIAN_GT_WEIGHTS);
        assert_eq!(b.features.n_points(), 1500);
        // sample std within ~4.5 standard errors (1/sqrt(2n) ~ 0.018)
        for (_, std) in b.features.column_moments() {
            assert!((std - 1.0).abs() < 0.08, "std {std}");
        }
        let again = gen_gaussian_benchmark(1500, &GAUSSIAN_GT_WEIGHTS, 3).unwrap();
        assert_eq!(b.features, again.features);
    }

    #[test]
    fn gaussian_ground_truth_is_scaled_copy() {
        let b = gen_gaussian_benchmark(20, &[2.0, 0.5], 1).unwrap();
        let Some(GroundTruth::Data(gt)) = &b.ground_truth else {
            panic!("expected data ground truth")
        };
        for i in 0..20 {
            assert_eq!(gt.get(i, 0), 2.0 * b.features.get(i, 0));
            assert_eq!(gt.get(i, 1), 0.5 * b.features.get(i, 1));
        }
    }

    #[test]
    fn monomial_benchmark_layout() {
        let gt = default_monomial_ground_truth();
        let b = gen_monomial_benchmark(50, 10, 3, &gt, 9).unwrap();
        assert_eq!(b.features.n_features(), 285);
        let base = standard_normal_matrix(50, 10, 9).unwrap();
        for i in 0..50 {
            assert_eq!(&b.features.row(i)[..10], base.row(i));
        }
        let w = b.gt_weights.unwrap();
        assert_eq!(w.n_nonzero(), 10);
        let x5 = b.feature_names.iter().position(|n| n == "X5").unwrap();
        assert_eq!(w[x5], 10.0);
    }

    #[test]
    fn monomial_support_out_of_range() {
        let gt = vec![(Monomial::parse("X11").unwrap(), 1.0)];
        assert!(gen_monomial_benchmark(10, 10, 3, &gt, 0).is_err());
        let gt = vec![(Monomial::parse("X1*X2*X3*X4").unwrap(), 1.0)];
        assert!(gen_monomial_benchmark(10, 10, 3, &gt, 0).is_err());
    }
}
