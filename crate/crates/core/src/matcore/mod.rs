//! Dense matrices, their entry statistics, and the SVD.

mod csv_io;
mod matrix;
mod rank;
mod selection;
mod stats;
mod svd;

pub use csv_io::{format_rational, parse_csv, parse_rational, write_csv};
pub use matrix::{f64_to_rational, rational_to_f64, DenseMatrix, EntryMode};
pub use rank::exact_rank;
pub use selection::SubmatrixSelection;
pub use stats::{
    centered, distance_to_constant_sq, frobenius_sq, frobenius_sq_exact, is_separated, mean,
    mean_exact, variance, variance_exact,
};
#[allow(unused_imports)]
pub(crate) use stats::kahan_sum;
pub use svd::{numerical_rank, svd, SvdResult, DEFAULT_RANK_TOL};
