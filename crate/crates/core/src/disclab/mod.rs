//! Discrepancy of real matrices: SVD witnesses, halving, variance floors and
//! the two-outcome step that drives the zero-submatrix pipelines.

mod constants;
pub(crate) mod halves;
mod step;
mod variance;
mod witness;

pub use constants::{grothendieck_bound, ConstantSet, ConstantTag};
pub use halves::{
    half_average_deviation_check, half_enumeration_size, half_shape, halve_reduce_average,
    HalfDeviation, HalfMode, HalfReduction,
};
pub(crate) use step::rank_of;
pub use step::{two_cases_step, StepCase, StepConfig, StepOutcome, StepRule};
pub use variance::{variance_floor, VarianceFloor, VarianceFloorMode};
pub use witness::{
    disc_lower_witness, gamma2_witness, gamma2_witness_from, rounded_negative_rectangle,
    DiscLowerWitness, Gamma2Witness, WITNESS_TOL,
};
