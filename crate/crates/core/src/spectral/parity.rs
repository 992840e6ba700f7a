use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::fourier::is_prime;
use crate::error::{Error, Result};
use crate::famcore::{intersection_histogram, BitSet, SetFamily};
use crate::oracles::rect::{Objective, RectProblem};
use crate::oracles::OracleBudget;

/// Parity imbalance of intersections against the `2^n / (4δ²)` size bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvenOddCheck {
    pub pairs: u128,
    pub even_pairs: u128,
    pub even_fraction: f64,
    /// `|even_fraction − 1/2|`; odd-heavy inputs are read through the odd side.
    pub delta: f64,
    pub odd_side: bool,
    /// `2^n / (4δ²)`, absent when `δ = 0`.
    pub bound: Option<f64>,
    pub holds: bool,
}

/// `holds` is decided exactly as `N·(2E − N)² ≤ 2^n·N²` with `N = |A||B|`.
pub fn even_odd_check(a: &SetFamily, b: &SetFamily) -> Result<EvenOddCheck> {
    let n = a.universe();
    let hist = intersection_histogram(a, b)?;
    let pairs: u128 = hist.iter().sum();
    let even_pairs: u128 = hist.iter().step_by(2).sum();
    if pairs == 0 {
        return Ok(EvenOddCheck {
            pairs,
            even_pairs,
            even_fraction: 0.0,
            delta: 0.0,
            odd_side: false,
            bound: None,
            holds: true,
        });
    }
    let big_n = BigInt::from(pairs);
    let imbalance: BigInt = (BigInt::from(even_pairs) * 2u32 - &big_n).abs();
    let lhs: BigInt = &big_n * &imbalance * &imbalance;
    let holds = lhs <= (BigInt::from(1) << n) * &big_n * &big_n;
    let even_fraction = even_pairs as f64 / pairs as f64;
    let delta = (even_fraction - 0.5).abs();
    Ok(EvenOddCheck {
        pairs,
        even_pairs,
        even_fraction,
        delta,
        odd_side: 2 * even_pairs < pairs,
        bound: (delta > 0.0).then(|| 2f64.powi(n as i32) / (4.0 * delta * delta)),
        holds,
    })
}

/// Largest `A' × B'` on which `|a ∩ b| mod p` is constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantModBiclique {
    pub product: u128,
    pub residue: u64,
    /// Indices into the first family.
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub left: Vec<usize>,
    /// Indices into the second family.
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub right: Vec<usize>,
    /// `product ≤ 2^n`.
    pub within_bound: bool,
}

/// Exact search, one rectangle problem per residue. `None` for empty inputs.
pub fn constant_mod_biclique_search(
    a: &SetFamily,
    b: &SetFamily,
    prime: u64,
    budget: &OracleBudget,
) -> Result<Option<ConstantModBiclique>> {
    if a.universe() != b.universe() {
        return Err(Error::UniverseMismatch {
            left: a.universe(),
            right: b.universe(),
        });
    }
    if !is_prime(prime) {
        return Err(Error::InvalidPrime(prime));
    }
    let small = a.len().min(b.len());
    if small > budget.max_family {
        return Err(Error::BudgetExceeded {
            what: "constant-residue biclique search",
            needed: small as u128,
            limit: budget.max_family as u128,
        });
    }
    if small == 0 {
        return Ok(None);
    }
    let swap = a.len() > b.len();
    let (rows, cols) = if swap { (b, a) } else { (a, b) };
    let residues: Vec<Vec<u64>> = rows
        .iter()
        .map(|x| cols.iter().map(|y| x.intersection_len(y) as u64 % prime).collect())
        .collect();

    let mut best: Option<ConstantModBiclique> = None;
    for r in 0..prime {
        let problem = RectProblem {
            patterns: residues
                .iter()
                .map(|row| {
                    BitSet::from_indices(cols.len(), (0..cols.len()).filter(|&j| row[j] == r))
                        .expect("column index in range")
                })
                .collect(),
            row_weights: vec![1; rows.len()],
            col_weights: vec![1; cols.len()],
        };
        let floor = best.as_ref().map_or(0, |b| b.product);
        if let Some(sol) = problem.solve(Objective::Area, floor) {
            let (left, right) = if swap { (sol.cols, sol.rows) } else { (sol.rows, sol.cols) };
            best = Some(ConstantModBiclique {
                product: sol.score,
                residue: r,
                left,
                right,
                within_bound: a.universe() >= 128 || sol.score <= 1u128 << a.universe(),
            });
        }
    }
    if let Some(res) = &best {
        let ok = res.left.iter().all(|&i| {
            res.right
                .iter()
                .all(|&j| a.get(i).intersection_len(b.get(j)) as u64 % prime == res.residue)
        });
        assert!(ok, "constant-residue biclique failed re-check");
    }
    Ok(best)
}
