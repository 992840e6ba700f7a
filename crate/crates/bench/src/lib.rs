//! Seeded inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerorect_core::famcore::{BitSet, SetFamily};
use zerorect_core::matcore::DenseMatrix;

/// `m × n` 0/1 matrix whose rows repeat one of `r` random prototypes.
pub fn low_rank_01(m: usize, n: usize, r: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let protos: Vec<Vec<i64>> = (0..r).map(|_| (0..n).map(|_| rng.gen_range(0..2)).collect()).collect();
    let data: Vec<i64> = (0..m).flat_map(|_| protos[rng.gen_range(0..r)].clone()).collect();
    DenseMatrix::from_i64_rational(m, n, &data).expect("shape matches data")
}

/// `m × n` integer matrix with entries uniform in `[lo, hi]`.
pub fn random_int(m: usize, n: usize, lo: i64, hi: i64, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<i64> = (0..m * n).map(|_| rng.gen_range(lo..=hi)).collect();
    DenseMatrix::from_i64_rational(m, n, &data).expect("shape matches data")
}

/// `len` sets over `[n]`, each element present with probability `p`.
pub fn random_family(n: usize, len: usize, p: f64, seed: u64) -> SetFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = (0..len)
        .map(|_| BitSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(p))).expect("indices below n"))
        .collect();
    SetFamily::from_sets(n, sets).expect("sets share the universe")
}
