use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::bitset::BitSet;
use crate::error::{Error, Result};

/// Ordered list of subsets of `[n]`. Duplicates are allowed and indexing
/// is by insertion position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    sets: Vec<BitSet>,
}

/// On-disk shape: `{"n": .., "sets": [[1-based, sorted], ..]}`.
#[derive(Serialize, Deserialize)]
struct FamilyFile {
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl SetFamily {
    pub fn new(n: usize) -> Self {
        SetFamily { n, sets: Vec::new() }
    }

    pub fn from_sets(n: usize, sets: Vec<BitSet>) -> Result<Self> {
        for s in &sets {
            if s.universe() != n {
                return Err(Error::UniverseMismatch {
                    left: n,
                    right: s.universe(),
                });
            }
        }
        Ok(SetFamily { n, sets })
    }

    pub fn from_one_based(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let sets = sets
            .iter()
            .map(|s| BitSet::from_one_based(n, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(SetFamily { n, sets })
    }

    /// All `2^n` subsets in mask order. Requires `n <= 30`.
    pub fn power_set(n: usize) -> Self {
        assert!(n <= 30, "power set too large");
        let sets = (0..1u64 << n).map(|m| BitSet::from_mask(n, m)).collect();
        SetFamily { n, sets }
    }

    /// All subsets of `ground` (given 1-based) inside `[n]`.
    pub fn power_set_of(n: usize, ground: &[usize]) -> Result<Self> {
        let g = ground.len();
        if g > 30 {
            return Err(Error::InvalidParams("ground set too large".into()));
        }
        let mut sets = Vec::with_capacity(1 << g);
        for m in 0..1u64 << g {
            let elems: Vec<usize> = (0..g)
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| ground[i])
                .collect();
            sets.push(BitSet::from_one_based(n, &elems)?);
        }
        Ok(SetFamily { n, sets })
    }

    pub fn push(&mut self, s: BitSet) -> Result<()> {
        if s.universe() != self.n {
            return Err(Error::UniverseMismatch {
                left: self.n,
                right: s.universe(),
            });
        }
        self.sets.push(s);
        Ok(())
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> &BitSet {
        &self.sets[i]
    }

    pub fn sets(&self) -> &[BitSet] {
        &self.sets
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BitSet> {
        self.sets.iter()
    }

    /// Keeps the first occurrence of each distinct set.
    pub fn dedup(&self) -> SetFamily {
        let mut seen = HashSet::new();
        let sets = self
            .sets
            .iter()
            .filter(|s| seen.insert((*s).clone()))
            .cloned()
            .collect();
        SetFamily { n: self.n, sets }
    }

    pub fn subfamily(&self, indices: &[usize]) -> SetFamily {
        SetFamily {
            n: self.n,
            sets: indices.iter().map(|&i| self.sets[i].clone()).collect(),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> SetFamily {
        SetFamily {
            n: self.n,
            sets: self.sets.iter().map(|s| s.permuted(perm)).collect(),
        }
    }

    /// Union of all members.
    pub fn union_all(&self) -> BitSet {
        let mut u = BitSet::new(self.n);
        for s in &self.sets {
            u.union_with(s);
        }
        u
    }

    /// Number of members contained in `u`.
    pub fn count_subsets_of(&self, u: &BitSet) -> usize {
        self.sets.iter().filter(|s| s.is_subset(u)).count()
    }

    pub fn to_json(&self) -> String {
        let file = FamilyFile {
            n: self.n,
            sets: self.sets.iter().map(|s| s.to_one_based()).collect(),
        };
        serde_json::to_string(&file).expect("family serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        SetFamily::from_one_based(file.n, &file.sets)
    }

    pub(crate) fn check_same_universe(&self, other: &SetFamily) -> Result<()> {
        if self.n != other.n {
            return Err(Error::UniverseMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a BitSet;
    type IntoIter = std::slice::Iter<'a, BitSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_byte_stable_for_sorted_input() {
        let text = r#"{"n":4,"sets":[[],[1,3],[2,3,4]]}"#;
        let f = SetFamily::from_json(text).unwrap();
        assert_eq!(f.to_json(), text);
    }

    #[test]
    fn rejects_out_of_range_elements() {
        assert!(SetFamily::from_json(r#"{"n":2,"sets":[[3]]}"#).is_err());
    }

    #[test]
    fn dedup_keeps_first_occurrences() {
        let f = SetFamily::from_one_based(3, &[vec![1], vec![2], vec![1], vec![]]).unwrap();
        let d = f.dedup();
        assert_eq!(d.len(), 3);
        assert_eq!(d.get(2).len(), 0);
    }

    #[test]
    fn power_set_of_ground() {
        let f = SetFamily::power_set_of(4, &[3, 4]).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f.get(3).to_one_based(), vec![3, 4]);
    }
}
