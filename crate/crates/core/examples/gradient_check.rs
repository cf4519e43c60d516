//! Analytic DII gradient against central finite differences on random
//! problems, plus a deliberately wrong gradient to show the check bites.
//!
//! cargo run --release --example gradient_check

use dii::math::gradcheck::{GradCheckInstance, GradientFn};
use dii::math::{dii_gradient, DataMatrix, RankMatrix, SoftmaxCoefficients, WeightVector};
use dii::rng::{stream_rng, Stream};

fn halved(
    data: &DataMatrix,
    w: &WeightVector,
    c: &SoftmaxCoefficients,
    r: &RankMatrix,
    lambda: f64,
) -> dii::Result<Vec<f64>> {
    Ok(dii_gradient(data, w, c, r, lambda)?.into_iter().map(|g| 0.5 * g).collect())
}

fn main() -> dii::Result<()> {
    let mut rng = stream_rng(0, Stream::GradCheck);
    for (n, d) in [(30, 3), (80, 8), (150, 15), (200, 20)] {
        let inst = GradCheckInstance::random(n, d, &mut rng)?;
        let good = inst.check(dii_gradient as GradientFn)?;
        let bad = inst.check(halved)?;
        println!(
            "N={n:3} D={d:2}  max relative error {:.2e}   (halved gradient: {:.2e})",
            good.max_rel_error, bad.max_rel_error
        );
    }
    Ok(())
}
