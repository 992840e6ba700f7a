//! Constructive extraction of cross-disjoint subfamilies and the supporting
//! random experiments.

mod cleaning;
mod covering_mc;
mod drc;
mod params;
mod random_union;
mod tuple;

pub use cleaning::{check_cleaned, clean_disjointness_graph, clean_min_degree, CleanedSides};
pub use covering_mc::{covering_probability_mc, covering_probability_mc_sampler, wilson_interval, McEstimate};
pub use drc::{
    check_tuple, drc_witness_search, DrcConfig, DrcOutcome, DrcParams, DrcStats, DrcWitness, TupleCheck,
    PROVEN_K_CONSTANT,
};
pub use params::{default_union_size, ExtractionParams};
pub use random_union::{
    bad_set_threshold, is_bad_set, random_union_extract, trial_rng, BadSetCheck, Extraction, TrialRecord,
};
pub use tuple::{grow_tuple, rho_power_fact, Side, TupleWitness};
