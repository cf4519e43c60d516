//! Numerical kernels: weighted distances, neighbor ranks, softmax
//! coefficients, the classic and differentiable imbalances and the analytic
//! gradient.
//!
//! Matrices are dense and row-major. Anchor rows may be a subset of the
//! points (`N_rows x N`); all normalizations then use `2 / (N_rows * N)`.

mod distance;
pub mod gradcheck;
mod imbalance;
mod ranks;
mod softmax;
mod types;

pub use distance::{all_rows, compute_distances, compute_weighted_distances, DistanceMatrix};
pub use imbalance::{
    classic_imbalance, classic_imbalance_from_distances, dii_gradient,
    dii_gradient_with_distances, dii_value,
};
pub use ranks::{compute_ranks, is_rank_permutation, RankMatrix};
pub use softmax::{
    adaptive_lambda, softmax_coefficients, LambdaMode, SoftmaxCoefficients, LAMBDA_FLOOR_FACTOR,
};
pub use types::{DataMatrix, WeightVector};

use crate::error::Result;

/// Forward pass at one weight vector: distances, scale, coefficients, DII.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub distances: DistanceMatrix,
    pub coefficients: SoftmaxCoefficients,
    pub lambda: f64,
    pub dii: f64,
}

pub fn evaluate(
    data: &DataMatrix,
    w: &WeightVector,
    ranks_b: &RankMatrix,
    lambda: LambdaMode,
) -> Result<Evaluation> {
    let distances = compute_weighted_distances(data, w, ranks_b.row_ids())?;
    let lambda = lambda.resolve(&distances)?;
    let coefficients = softmax_coefficients(&distances, lambda)?;
    let dii = dii_value(&coefficients, ranks_b)?;
    Ok(Evaluation {
        distances,
        coefficients,
        lambda,
        dii,
    })
}

impl Evaluation {
    pub fn gradient(
        &self,
        data: &DataMatrix,
        w: &WeightVector,
        ranks_b: &RankMatrix,
    ) -> Result<Vec<f64>> {
        dii_gradient_with_distances(
            data,
            w,
            &self.distances,
            &self.coefficients,
            ranks_b,
            self.lambda,
        )
    }
}
