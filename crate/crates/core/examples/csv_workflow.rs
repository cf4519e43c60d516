//! Round trip through CSV: write a dataset with ground-truth columns, load
//! it back by column role, learn weights and score them.
//!
//! cargo run --release --example csv_workflow

use dii::dataio::{gen_gaussian_benchmark, load_csv, write_bundle_csv, ColumnRoles};
use dii::math::{all_rows, LambdaMode};
use dii::optimizer::{evaluate_dii_fixed, optimize_dii, LearningRate, OptimizerConfig};

fn main() -> dii::Result<()> {
    let dir = std::env::temp_dir().join("dii-csv-workflow");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("data.csv");
    write_bundle_csv(&path, &gen_gaussian_benchmark(300, &[2.0, 1.0, 0.0], 9)?)?;

    let roles = ColumnRoles {
        ground_truth: vec!["B*".into()],
        ignore: vec![],
    };
    let bundle = load_csv(&path, &roles)?;
    println!("features {:?}, ground truth {:?}", bundle.feature_names, bundle.gt_names);

    let ranks = bundle.ground_truth_ranks(&all_rows(300))?;
    let cfg = OptimizerConfig {
        n_epochs: 40,
        eta0: LearningRate::Fixed(5.0),
        ..Default::default()
    };
    let trace = optimize_dii(&bundle.features, &ranks, &cfg)?;
    let w = trace.best_weights();
    let start = evaluate_dii_fixed(&bundle.features, &ranks, &trace.records[0].weights, LambdaMode::Adaptive)?;
    println!("DII {start:.4} at the start, {:.4} with weights {:?}", trace.best_dii(), w.as_slice());
    Ok(())
}
