//! Set families over `[n]` and their disjointness structure.

mod bitset;
mod family;
mod graph;
mod pairs;

pub use bitset::{BitSet, Iter as BitSetIter};
pub use family::SetFamily;
pub use graph::{build_graph, BipartiteGraph, DisjointnessGraph};
pub use pairs::{disjoint_pairs, intersection_histogram, lambda_pairs, PairCount};
