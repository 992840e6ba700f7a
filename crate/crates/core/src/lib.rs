//! Disjointness graphs of set families, covering probabilities, intersection
//! spectra, and large zero or constant submatrices of low-rank matrices.

pub mod constructions;
pub mod disclab;
pub mod distribution;
pub mod error;
pub mod extract;
pub mod famcore;
pub mod matcore;
pub mod oracles;
pub(crate) mod serde_util;
pub mod spectral;
pub mod zerorect;

pub use distribution::Distribution;
pub use error::{Error, Result};
pub use famcore::{BitSet, DisjointnessGraph, SetFamily};
pub use matcore::{DenseMatrix, EntryMode, SubmatrixSelection, SvdResult};
