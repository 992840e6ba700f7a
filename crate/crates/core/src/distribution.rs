use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::famcore::{BitSet, SetFamily};

/// Largest universe for which a product measure is expanded to explicit atoms.
pub const MAX_EXPLICIT_UNIVERSE: usize = 20;

/// Finite-support probability distribution on subsets of `[n]`.
///
/// Atoms are distinct, carry positive weight, and the weights sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    n: usize,
    atoms: Vec<(BitSet, BigRational)>,
}

impl Distribution {
    /// Merges repeated sets, drops zero weights, and checks the total.
    pub fn new(n: usize, atoms: Vec<(BitSet, BigRational)>) -> Result<Self> {
        let mut index: HashMap<BitSet, usize> = HashMap::new();
        let mut merged: Vec<(BitSet, BigRational)> = Vec::new();
        for (s, w) in atoms {
            if s.universe() != n {
                return Err(Error::UniverseMismatch {
                    left: n,
                    right: s.universe(),
                });
            }
            if w.is_negative() {
                return Err(Error::InvalidDistribution(format!("negative weight {w}")));
            }
            match index.get(&s) {
                Some(&k) => merged[k].1 += w,
                None => {
                    index.insert(s.clone(), merged.len());
                    merged.push((s, w));
                }
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        let total: BigRational = merged.iter().map(|(_, w)| w).sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        Ok(Distribution { n, atoms: merged })
    }

    /// Uniform over the members of `f`, counting repeats with multiplicity.
    pub fn uniform_on(f: &SetFamily) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let w = BigRational::new(1.into(), f.len().into());
        Self::new(
            f.universe(),
            f.iter().map(|s| (s.clone(), w.clone())).collect(),
        )
    }

    pub fn point_mass(s: BitSet) -> Self {
        Distribution {
            n: s.universe(),
            atoms: vec![(s, BigRational::one())],
        }
    }

    /// Each element included independently with probability `p`.
    pub fn product(n: usize, p: &BigRational) -> Result<Self> {
        if p.is_negative() || *p > BigRational::one() {
            return Err(Error::InvalidProbability(p.to_f64().unwrap_or(f64::NAN)));
        }
        if n > MAX_EXPLICIT_UNIVERSE {
            return Err(Error::BudgetExceeded {
                what: "explicit product measure",
                needed: 1u128 << n.min(127),
                limit: 1 << MAX_EXPLICIT_UNIVERSE,
            });
        }
        let q = BigRational::one() - p;
        let pow = |x: &BigRational, e: usize| num_traits::pow(x.clone(), e);
        let atoms = (0..1u64 << n)
            .map(|m| {
                let k = m.count_ones() as usize;
                (BitSet::from_mask(n, m), pow(p, k) * pow(&q, n - k))
            })
            .collect();
        Self::new(n, atoms)
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(BitSet, BigRational)] {
        &self.atoms
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    /// `μ(2^U)`: total weight of atoms contained in `u`.
    pub fn mass_below(&self, u: &BitSet) -> BigRational {
        self.atoms
            .iter()
            .filter(|(s, _)| s.is_subset(u))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn sampler(&self) -> SetSampler {
        let weights: Vec<f64> = self
            .atoms
            .iter()
            .map(|(_, w)| w.to_f64().unwrap_or(0.0))
            .collect();
        SetSampler::Atoms {
            sets: self.atoms.iter().map(|(s, _)| s.clone()).collect(),
            index: WeightedIndex::new(weights).expect("positive weights"),
        }
    }
}

/// Draws sets either from explicit atoms or from a product measure.
#[derive(Clone, Debug)]
pub enum SetSampler {
    Atoms {
        sets: Vec<BitSet>,
        index: WeightedIndex<f64>,
    },
    Product {
        n: usize,
        p: f64,
    },
}

impl SetSampler {
    pub fn product(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(SetSampler::Product { n, p })
    }

    pub fn universe(&self) -> usize {
        match self {
            SetSampler::Atoms { sets, .. } => sets[0].universe(),
            SetSampler::Product { n, .. } => *n,
        }
    }

    /// Number of distinct sets the sampler can return, if finite and known.
    pub fn support_len(&self) -> Option<usize> {
        match self {
            SetSampler::Atoms { sets, .. } => Some(sets.len()),
            SetSampler::Product { p, .. } if *p == 0.0 || *p == 1.0 => Some(1),
            SetSampler::Product { .. } => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitSet {
        match self {
            SetSampler::Atoms { sets, index } => sets[index.sample(rng)].clone(),
            SetSampler::Product { n, p } => {
                let mut s = BitSet::new(*n);
                for i in 0..*n {
                    if rng.gen::<f64>() < *p {
                        s.insert(i);
                    }
                }
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn merges_repeats_and_checks_total() {
        let a = BitSet::from_one_based(2, &[1]).unwrap();
        let d = Distribution::new(2, vec![(a.clone(), q(1, 2)), (a.clone(), q(1, 2))]).unwrap();
        assert_eq!(d.support_len(), 1);
        assert!(Distribution::new(2, vec![(a, q(1, 3))]).is_err());
    }

    #[test]
    fn product_measure_edges() {
        let d = Distribution::product(3, &q(0, 1)).unwrap();
        assert_eq!(d.support_len(), 1);
        assert!(d.atoms()[0].0.is_empty());
        let u = Distribution::product(3, &q(1, 2)).unwrap();
        assert_eq!(u.support_len(), 8);
        assert!(u.atoms().iter().all(|(_, w)| *w == q(1, 8)));
        assert!(Distribution::product(2, &q(3, 2)).is_err());
    }

    #[test]
    fn mass_below_counts_subsets() {
        let d = Distribution::uniform_on(&SetFamily::power_set(2)).unwrap();
        assert_eq!(d.mass_below(&BitSet::from_one_based(2, &[1]).unwrap()), q(1, 2));
        assert!(Distribution::uniform_on(&SetFamily::new(2)).is_err());
    }
}
