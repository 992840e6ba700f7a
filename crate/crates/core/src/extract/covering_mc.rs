use rayon::prelude::*;
use serde::Serialize;

use super::random_union::trial_rng;
use crate::distribution::{Distribution, SetSampler};
use crate::error::{Error, Result};
use crate::famcore::BitSet;

/// 97.5% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Wilson score interval at 95%.
    pub lower: f64,
    pub upper: f64,
    pub hits: u64,
    pub trials: u64,
}

impl McEstimate {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Estimates `P[A₀ ⊆ A₁ ∪ … ∪ A_r]`; trial `i` draws from `seed ⊕ i`.
pub fn covering_probability_mc(mu: &Distribution, r: usize, trials: u64, seed: u64) -> Result<McEstimate> {
    covering_probability_mc_sampler(&mu.sampler(), r, trials, seed)
}

pub fn covering_probability_mc_sampler(
    sampler: &SetSampler,
    r: usize,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParams("at least one trial is required".into()));
    }
    if sampler.support_len() == Some(1) {
        // A₀ is always one of the A_i draws' common value
        return Ok(McEstimate {
            estimate: 1.0,
            lower: 1.0,
            upper: 1.0,
            hits: trials,
            trials,
        });
    }
    let n = sampler.universe();
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let a0 = sampler.sample(&mut rng);
            let mut u = BitSet::new(n);
            for _ in 0..r {
                u.union_with(&sampler.sample(&mut rng));
            }
            a0.is_subset(&u) as u64
        })
        .sum();
    let (lower, upper) = wilson_interval(hits, trials);
    Ok(McEstimate {
        estimate: hits as f64 / trials as f64,
        lower,
        upper,
        hits,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::famcore::SetFamily;
    use num_rational::BigRational;

    #[test]
    fn point_mass_is_certain() {
        let mu = Distribution::point_mass(BitSet::new(3));
        let e = covering_probability_mc(&mu, 2, 100, 1).unwrap();
        assert_eq!((e.estimate, e.lower, e.upper), (1.0, 1.0, 1.0));
    }

    #[test]
    fn singletons_half() {
        let f = SetFamily::from_one_based(2, &[vec![1], vec![2]]).unwrap();
        let mu = Distribution::uniform_on(&f).unwrap();
        let e = covering_probability_mc(&mu, 1, 100_000, 5).unwrap();
        assert!(e.contains(0.5), "{e:?}");
    }

    #[test]
    fn product_measure() {
        let mu = Distribution::product(6, &BigRational::new(1.into(), 3.into())).unwrap();
        let e = covering_probability_mc(&mu, 2, 100_000, 11).unwrap();
        assert!(e.contains((23.0f64 / 27.0).powi(6)), "{e:?}");
        let s = SetSampler::product(6, 1.0 / 3.0).unwrap();
        let e = covering_probability_mc_sampler(&s, 2, 100_000, 11).unwrap();
        assert!(e.contains((23.0f64 / 27.0).powi(6)), "{e:?}");
    }

    #[test]
    fn wilson_edges() {
        let (l, u) = wilson_interval(0, 10);
        assert_eq!(l, 0.0);
        assert!(u > 0.0 && u < 0.4);
    }
}
