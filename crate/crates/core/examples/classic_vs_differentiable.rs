//! The differentiable imbalance approaches the rank-based one as the
//! softmax scale shrinks, and is 1 for an uninformative ground truth.
//!
//! cargo run --release --example classic_vs_differentiable

use dii::dataio::gen_gaussian_benchmark;
use dii::math::{
    adaptive_lambda, all_rows, classic_imbalance_from_distances, compute_weighted_distances,
    dii_value, softmax_coefficients, WeightVector,
};

fn main() -> dii::Result<()> {
    let bundle = gen_gaussian_benchmark(500, &[1.0, 1.0, 0.3], 5)?;
    let rows = all_rows(500);
    let ranks = bundle.ground_truth_ranks(&rows)?;
    let w = WeightVector::new(vec![1.0, 0.6, 0.0])?;
    let d = compute_weighted_distances(&bundle.features, &w, &rows)?;
    let classic = classic_imbalance_from_distances(&d, &ranks)?;
    let l0 = adaptive_lambda(&d)?;
    println!("classic imbalance {classic:.5}, adaptive lambda {l0:.4}");
    for k in 0..12 {
        let lambda = l0 * 0.5f64.powi(k);
        let dii = dii_value(&softmax_coefficients(&d, lambda)?, &ranks)?;
        println!("lambda {lambda:10.3e}  DII {dii:.5}  gap {:.2e}", (dii - classic).abs());
    }
    Ok(())
}
