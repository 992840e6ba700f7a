//! Exact exponential-time references. Each refuses inputs over budget
//! rather than approximating.

mod biclique;
mod budget;
mod constant;
mod covering;
mod cutnorm;
pub(crate) mod rect;

pub use biclique::{
    by_family as biclique_by_family, by_universe as biclique_by_universe,
    certify as certify_cross_disjoint, max_cross_disjoint_biclique, BicliqueResult, BicliqueRoute,
};
pub use budget::OracleBudget;
pub use constant::{
    certify as certify_constant, find_constant_rectangle, max_constant_rectangle,
    max_constant_square, ConstantBlock,
};
pub use covering::{
    covering_lower_bound, covering_probability_exact, covering_probability_table,
    covering_probability_tuples, meets_covering_bound,
};
pub use cutnorm::{cut_norm_exact, disc_exact, CutNormResult};
