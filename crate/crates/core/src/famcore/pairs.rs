use rayon::prelude::*;

use super::family::SetFamily;
use crate::error::{Error, Result};

/// Ordered-pair count together with its density in `|A||B|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCount {
    pub count: u128,
    pub density: f64,
}

fn density(count: u128, a: &SetFamily, b: &SetFamily) -> f64 {
    let total = a.len() as u128 * b.len() as u128;
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Number of ordered pairs `(a, b)` with `a ∩ b = ∅`.
pub fn disjoint_pairs(a: &SetFamily, b: &SetFamily) -> Result<PairCount> {
    a.check_same_universe(b)?;
    let count: u128 = a
        .sets()
        .par_iter()
        .map(|x| b.iter().filter(|y| x.is_disjoint(y)).count() as u128)
        .sum();
    Ok(PairCount {
        count,
        density: density(count, a, b),
    })
}

/// Number of ordered pairs with `|a ∩ b| = lambda`.
pub fn lambda_pairs(a: &SetFamily, b: &SetFamily, lambda: usize) -> Result<u128> {
    a.check_same_universe(b)?;
    if lambda > a.universe() {
        return Err(Error::InvalidLambda {
            lambda,
            n: a.universe(),
        });
    }
    Ok(intersection_histogram(a, b)?[lambda])
}

/// Entry `l` counts ordered pairs with `|a ∩ b| = l`, for `l` in `0..=n`.
pub fn intersection_histogram(a: &SetFamily, b: &SetFamily) -> Result<Vec<u128>> {
    a.check_same_universe(b)?;
    let n = a.universe();
    let hist = a
        .sets()
        .par_iter()
        .fold(
            || vec![0u128; n + 1],
            |mut h, x| {
                for y in b {
                    h[x.intersection_len(y)] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![0u128; n + 1],
            |mut l, r| {
                for (x, y) in l.iter_mut().zip(r) {
                    *x += y;
                }
                l
            },
        );
    Ok(hist)
}
