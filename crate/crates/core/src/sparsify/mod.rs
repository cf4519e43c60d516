//! Sparse feature subsets built on top of the optimizer.
//!
//! [`lasso_search`] screens L1 strengths, [`greedy_backward`] drops the
//! smallest weight one feature at a time and [`exhaustive_search`] tries every
//! subset of a small feature set. All three return a [`SparsityPath`].
//! Anchor-row subsampling and block cross-validation live here too.

mod crossval;
mod path;
mod rows;
mod search;

pub use crossval::{block_cross_validate, BlockSplit, CrossValidation, FoldResult};
pub use path::{PathEntry, PathKind, SparsityPath};
pub use rows::{subsample_rows, RowMode};
pub use search::{
    default_p_grid, exhaustive_search, greedy_backward, lasso_search, EXHAUSTIVE_MAX_FEATURES,
};
