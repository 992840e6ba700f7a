//! Entropy inequalities and the Fourier view of intersection sizes.

mod entropy;
mod fourier;
mod parity;

pub use entropy::{
    binary_entropy, entropy_gap, entropy_grid_scan, expected_union_exact, subadditivity_bound,
    union_entropy_check, CoordinateMarginals, EntropyScan, UnionEntropyCheck, SCAN_PRECISION,
};
pub use fourier::{
    bias, intersection_distribution, is_prime, parseval_check, IntersectionDistribution,
    ParsevalCheck,
};
pub use parity::{constant_mod_biclique_search, even_odd_check, ConstantModBiclique, EvenOddCheck};
