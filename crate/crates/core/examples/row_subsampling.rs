//! Epoch cost with all anchor rows versus a fixed 100-row subset, for
//! growing N. The subset makes each epoch linear in N.
//!
//! cargo run --release --example row_subsampling

use std::time::Instant;

use dii::dataio::{default_monomial_ground_truth, gen_monomial_benchmark};
use dii::optimizer::{optimize_dii, LearningRate, OptimizerConfig};
use dii::sparsify::{subsample_rows, RowMode};

fn seconds_per_epoch(n: usize, rows: RowMode, epochs: usize) -> dii::Result<f64> {
    let bundle = gen_monomial_benchmark(n, 10, 3, &default_monomial_ground_truth(), 1)?;
    let ranks = bundle.ground_truth_ranks(&subsample_rows(n, rows, 1)?)?;
    let cfg = OptimizerConfig {
        n_epochs: epochs,
        eta0: LearningRate::Fixed(100.0),
        ..Default::default()
    };
    let t = Instant::now();
    optimize_dii(&bundle.features, &ranks, &cfg)?;
    Ok(t.elapsed().as_secs_f64() / epochs as f64)
}

fn main() -> dii::Result<()> {
    println!("{:>6} {:>12} {:>12}", "N", "all rows", "100 rows");
    for n in [250, 500, 1000, 2000] {
        let full = seconds_per_epoch(n, RowMode::All, 3)?;
        let sub = seconds_per_epoch(n, RowMode::Fixed(100), 3)?;
        println!("{n:>6} {full:>11.4}s {sub:>11.4}s");
    }
    Ok(())
}
