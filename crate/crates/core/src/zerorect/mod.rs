//! Zero and constant submatrices of low-rank matrices: entry capping, sparse
//! extraction, and the halving pipelines built on the two-outcome step.

mod canonical;
mod config;
mod pipeline;
mod sparse;

pub use config::{
    progress_drop, progress_values, PipelineConfig, PipelineTrace, ProgressForm, ProgressValues, Stage, Termination,
    TraceStep,
};
pub use pipeline::{find_constant_submatrix_int, find_zero_submatrix, ConstantResult, ZeroResult};
pub use sparse::{regularize_bounded, sparse_zero_extract, Regularization, SparseExtraction};
