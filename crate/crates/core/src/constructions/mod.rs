//! Extremal families and matrices with known zero and constant structure,
//! plus a verifier that measures each claimed property.

mod generators;
mod verify;

pub use generators::{
    gen_c1, gen_c2, gen_c3, gen_c4, gen_pbiased, grid_vectors, ConstructionSpec, PBiased, MAX_GENERATED_SIDE,
};
pub use verify::{c2_structural_max, default_verify_budget, verify_construction, Claim, ClaimStatus, VerificationReport};
