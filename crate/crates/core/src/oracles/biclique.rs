use serde::Serialize;

use super::budget::OracleBudget;
use super::rect::{Objective, RectProblem};
use crate::error::{Error, Result};
use crate::famcore::{BitSet, SetFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BicliqueRoute {
    /// Branch-and-bound over subfamilies of the smaller side.
    Family,
    /// Scan of every splitting set `U ⊆ [n]`.
    Universe,
}

/// Cross-disjoint pair maximizing `|R|·|S|`. Empty when no disjoint pair exists.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BicliqueResult {
    pub product: u128,
    /// Indices into the first family.
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub left: Vec<usize>,
    /// Indices into the second family.
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub right: Vec<usize>,
    pub route: BicliqueRoute,
}

pub fn max_cross_disjoint_biclique(
    a: &SetFamily,
    b: &SetFamily,
    budget: &OracleBudget,
) -> Result<BicliqueResult> {
    if a.universe() != b.universe() {
        return Err(Error::UniverseMismatch {
            left: a.universe(),
            right: b.universe(),
        });
    }
    let res = if a.len().min(b.len()) <= budget.max_family {
        by_family(a, b)
    } else if a.universe() <= budget.max_universe.min(30) {
        budget.check_memory("splitting-set tables", 8u128 << a.universe())?;
        by_universe(a, b)
    } else {
        return Err(Error::BudgetExceeded {
            what: "cross-disjoint biclique search",
            needed: a.len().min(b.len()) as u128,
            limit: budget.max_family as u128,
        });
    };
    assert!(certify(a, b, &res.left, &res.right), "biclique failed re-check");
    Ok(res)
}

/// Every chosen pair is disjoint.
pub fn certify(a: &SetFamily, b: &SetFamily, left: &[usize], right: &[usize]) -> bool {
    left.iter()
        .all(|&i| right.iter().all(|&j| a.get(i).is_disjoint(b.get(j))))
}

pub fn by_family(a: &SetFamily, b: &SetFamily) -> BicliqueResult {
    let swap = a.len() > b.len();
    let (rows, cols) = if swap { (b, a) } else { (a, b) };
    let problem = RectProblem {
        patterns: rows
            .iter()
            .map(|x| {
                BitSet::from_indices(cols.len(), (0..cols.len()).filter(|&j| x.is_disjoint(cols.get(j))))
                    .unwrap()
            })
            .collect(),
        row_weights: vec![1; rows.len()],
        col_weights: vec![1; cols.len()],
    };
    let (r, s, product) = match problem.solve(Objective::Area, 0) {
        Some(sol) => (sol.rows, sol.cols, sol.score),
        None => (Vec::new(), Vec::new(), 0),
    };
    let (left, right) = if swap { (s, r) } else { (r, s) };
    BicliqueResult {
        product,
        left,
        right,
        route: BicliqueRoute::Family,
    }
}

pub fn by_universe(a: &SetFamily, b: &SetFamily) -> BicliqueResult {
    let n = a.universe();
    let size = 1usize << n;
    let count_below = |f: &SetFamily| {
        let mut t = vec![0u32; size];
        for s in f {
            t[s.mask() as usize] += 1;
        }
        for i in 0..n {
            for u in 0..size {
                if u >> i & 1 == 1 {
                    t[u] += t[u ^ (1 << i)];
                }
            }
        }
        t
    };
    let ca = count_below(a);
    let cb = count_below(b);
    let full = size - 1;
    let mut best = (0u128, 0usize);
    for u in 0..size {
        let v = ca[u] as u128 * cb[full ^ u] as u128;
        if v > best.0 {
            best = (v, u);
        }
    }
    let (product, u) = best;
    if product == 0 {
        return BicliqueResult {
            product,
            left: Vec::new(),
            right: Vec::new(),
            route: BicliqueRoute::Universe,
        };
    }
    let us = BitSet::from_mask(n, u as u64);
    let comp = us.complement();
    BicliqueResult {
        product,
        left: (0..a.len()).filter(|&i| a.get(i).is_subset(&us)).collect(),
        right: (0..b.len()).filter(|&j| b.get(j).is_subset(&comp)).collect(),
        route: BicliqueRoute::Universe,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fully_cross_disjoint() {
        let a = SetFamily::power_set_of(4, &[1, 2]).unwrap();
        let b = SetFamily::power_set_of(4, &[3, 4]).unwrap();
        let r = max_cross_disjoint_biclique(&a, &b, &OracleBudget::default()).unwrap();
        assert_eq!(r.product, 16);
    }

    #[test]
    fn no_disjoint_pair_gives_zero() {
        let a = SetFamily::from_one_based(1, &[vec![1]]).unwrap();
        let r = max_cross_disjoint_biclique(&a, &a, &OracleBudget::default()).unwrap();
        assert_eq!(r.product, 0);
        assert!(r.left.is_empty() && r.right.is_empty());
    }

    #[test]
    fn power_set_of_two() {
        let p = SetFamily::power_set(2);
        let r = max_cross_disjoint_biclique(&p, &p, &OracleBudget::default()).unwrap();
        assert_eq!(r.product, 4);
        assert_eq!(by_universe(&p, &p).product, 4);
    }

    #[test]
    fn routes_agree() {
        let mut seed = 7u64;
        for _ in 0..100 {
            let mut sets = Vec::new();
            for _ in 0..10 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                sets.push(BitSet::from_mask(6, (seed >> 40) & (seed >> 20) & 63));
            }
            let a = SetFamily::from_sets(6, sets[..5].to_vec()).unwrap();
            let b = SetFamily::from_sets(6, sets[5..].to_vec()).unwrap();
            assert_eq!(by_family(&a, &b).product, by_universe(&a, &b).product);
        }
    }
}
