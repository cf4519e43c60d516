//! Differentiable Information Imbalance (DII) feature weighting and selection.
//!
//! Given input features `A` and a ground-truth space `B`, the DII measures how
//! well nearest neighbors under a weighted metric on `A` predict neighbor
//! ranks in `B`. It is smooth in the weights, so they can be learned by
//! gradient descent; L1 shrinkage or backward elimination then yields sparse
//! feature subsets.
//!
//! * [`math`]: distances, ranks, softmax coefficients, DII and its gradient
//! * [`optimizer`]: the gradient-descent loop with learning-rate decay and
//!   L1 clipping
//! * [`sparsify`]: L1 grids, backward elimination, exhaustive subsets,
//!   anchor-row subsampling and block cross-validation
//! * [`dataio`]: CSV ingestion, synthetic benchmarks, metrics

pub mod dataio;
pub mod error;
pub mod math;
pub mod cli;
pub mod optimizer;
pub mod rng;
pub mod sparsify;

pub use error::{DiiError, Result};
