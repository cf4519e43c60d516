//! Brute-force reference implementations, written directly from the
//! definitions with nested vectors and no shared code with the library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect()
}

pub fn distance(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(w)
        .map(|((x, y), w)| (w * (x - y)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `ranks[i][j]`: 1 for the nearest neighbor of `i`, ties by lower index.
pub fn ranks(points: &[Vec<f64>], w: &[f64]) -> Vec<Vec<usize>> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let mut others: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (distance(&points[i], &points[j], w), j))
                .collect();
            others.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let mut r = vec![0; n];
            for (pos, (_, j)) in others.into_iter().enumerate() {
                r[j] = pos + 1;
            }
            r
        })
        .collect()
}

pub fn adaptive_lambda(points: &[Vec<f64>], w: &[f64], rows: &[usize]) -> f64 {
    let gaps: Vec<f64> = rows
        .iter()
        .map(|&i| {
            let mut d: Vec<f64> = (0..points.len())
                .filter(|&j| j != i)
                .map(|j| distance(&points[i], &points[j], w))
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d[1] - d[0]
        })
        .collect();
    let min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    (min + mean) / 2.0
}

/// Contribution of anchor `i`: `Σ_j c_ij r_ij`.
pub fn row_term(points: &[Vec<f64>], w: &[f64], gt_ranks: &[Vec<usize>], i: usize, lambda: f64) -> f64 {
    let n = points.len();
    let e: Vec<f64> = (0..n)
        .map(|j| if j == i { 0.0 } else { (-distance(&points[i], &points[j], w) / lambda).exp() })
        .collect();
    let z: f64 = e.iter().sum();
    (0..n).map(|j| e[j] / z * gt_ranks[i][j] as f64).sum()
}

pub fn dii(points: &[Vec<f64>], w: &[f64], gt_ranks: &[Vec<usize>], rows: &[usize], lambda: f64) -> f64 {
    let n = points.len() as f64;
    let s: f64 = rows.iter().map(|&i| row_term(points, w, gt_ranks, i, lambda)).sum();
    2.0 * s / (rows.len() as f64 * n)
}

/// Rank-based imbalance: mean ground-truth rank of each anchor's nearest
/// neighbor in the weighted space, times `2/N`.
pub fn classic(points: &[Vec<f64>], w: &[f64], gt_ranks: &[Vec<usize>], rows: &[usize]) -> f64 {
    let r = ranks(points, w);
    let n = points.len() as f64;
    let s: usize = rows
        .iter()
        .map(|&i| {
            let nn = r[i].iter().position(|&v| v == 1).unwrap();
            gt_ranks[i][nn]
        })
        .sum();
    2.0 * s as f64 / (rows.len() as f64 * n)
}
