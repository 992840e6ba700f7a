use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::budget::OracleBudget;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::famcore::BitSet;

/// Largest universe handled by the subset-table route.
const TABLE_MAX_UNIVERSE: usize = 16;
/// Largest number of `r`-tuples the tuple route will visit.
const TUPLE_LIMIT: u128 = 1 << 22;

/// Exact `P[A₀ ⊆ A₁ ∪ … ∪ A_r]` for independent draws from `mu`.
pub fn covering_probability_exact(
    mu: &Distribution,
    r: usize,
    budget: &OracleBudget,
) -> Result<BigRational> {
    let n = mu.universe();
    if n <= TABLE_MAX_UNIVERSE.min(budget.max_universe) {
        covering_probability_table(mu, r, budget)
    } else {
        covering_probability_tuples(mu, r)
    }
}

fn common_denominator(mu: &Distribution) -> BigInt {
    mu.atoms()
        .iter()
        .fold(BigInt::one(), |d, (_, w)| d.lcm(w.denom()))
}

/// Sums `μ(2^U)` over the distribution of `U = A₁ ∪ … ∪ A_r`, whose law is
/// recovered from `μ(2^U)^r` by Möbius inversion over the subset lattice.
pub fn covering_probability_table(
    mu: &Distribution,
    r: usize,
    budget: &OracleBudget,
) -> Result<BigRational> {
    let n = mu.universe();
    if n > TABLE_MAX_UNIVERSE {
        return Err(Error::BudgetExceeded {
            what: "covering subset table",
            needed: 1u128 << n,
            limit: 1 << TABLE_MAX_UNIVERSE,
        });
    }
    budget.check_memory("covering subset table", 96u128 << n)?;
    let size = 1usize << n;
    let d = common_denominator(mu);
    // g[U] = D·μ(2^U)
    let mut g = vec![BigInt::zero(); size];
    for (s, w) in mu.atoms() {
        g[s.mask() as usize] += w.numer() * (&d / w.denom());
    }
    for i in 0..n {
        for u in 0..size {
            if u >> i & 1 == 1 {
                let (lo, hi) = g.split_at_mut(u);
                hi[0] += &lo[u ^ (1 << i)];
            }
        }
    }
    let mut h: Vec<BigInt> = g.iter().map(|x| num_traits::pow(x.clone(), r)).collect();
    for i in 0..n {
        for u in 0..size {
            if u >> i & 1 == 1 {
                let (lo, hi) = h.split_at_mut(u);
                hi[0] -= &lo[u ^ (1 << i)];
            }
        }
    }
    let total: BigInt = h.iter().zip(&g).map(|(p, q)| p * q).sum();
    Ok(BigRational::new(total, num_traits::pow(d, r + 1)))
}

/// Enumerates every `r`-tuple of atoms and groups them by union.
pub fn covering_probability_tuples(mu: &Distribution, r: usize) -> Result<BigRational> {
    let k = mu.support_len() as u128;
    let tuples = k.checked_pow(r as u32).unwrap_or(u128::MAX);
    if tuples > TUPLE_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "covering tuple enumeration",
            needed: tuples,
            limit: TUPLE_LIMIT,
        });
    }
    let n = mu.universe();
    let mut unions: HashMap<BitSet, BigRational> = HashMap::new();
    unions.insert(BitSet::new(n), BigRational::one());
    for _ in 0..r {
        let mut next: HashMap<BitSet, BigRational> = HashMap::new();
        for (u, w) in &unions {
            for (s, ws) in mu.atoms() {
                *next.entry(u.union(s)).or_insert_with(BigRational::zero) += w * ws;
            }
        }
        unions = next;
    }
    Ok(unions.iter().map(|(u, w)| w * mu.mass_below(u)).sum())
}

/// The lower bound `2^(−n/r − 2)` as a float; `r = 0` gives 0.
pub fn covering_lower_bound(n: usize, r: usize) -> f64 {
    if r == 0 {
        return 0.0;
    }
    (-(n as f64) / r as f64 - 2.0).exp2()
}

/// Exact test of `P ≥ 2^(−n/r − 2)` via `P^r ≥ 2^(−n − 2r)`.
pub fn meets_covering_bound(p: &BigRational, n: usize, r: usize) -> bool {
    if r == 0 {
        return true;
    }
    let lhs = num_traits::pow(p.clone(), r);
    let rhs = BigRational::new(BigInt::one(), BigInt::one() << (n + 2 * r));
    lhs >= rhs
}
