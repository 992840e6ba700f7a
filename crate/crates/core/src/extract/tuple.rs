use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::famcore::{BipartiteGraph, BitSet, DisjointnessGraph, SetFamily};
use crate::matcore::f64_to_rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Greedy tuple whose every prefix keeps a large common neighbourhood and a
/// large union.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TupleWitness {
    pub side: Side,
    /// Indices into the chosen side's family, in order of selection.
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub indices: Vec<usize>,
    /// `|N(A₁, …, A_i)|` for each prefix.
    pub neighborhood_sizes: Vec<usize>,
    /// `|A₁ ∪ … ∪ A_i|` for each prefix.
    pub union_sizes: Vec<usize>,
    pub eps: f64,
    pub rho: f64,
    /// Set when even the first prefix misses its thresholds.
    pub fallback: bool,
}

/// `|N| ≥ (ε/64)^i · other` evaluated exactly.
fn neighborhood_ok(size: usize, i: usize, eps: &BigRational, other: usize) -> bool {
    let t = num_traits::pow(eps / BigRational::from_integer(64.into()), i)
        * BigRational::from_integer(other.into());
    BigRational::from_integer(size.into()) >= t
}

/// `|U| ≥ (1/2 − ρ^i) · n` evaluated exactly.
fn union_ok(size: usize, i: usize, rho: &BigRational, n: usize) -> bool {
    let half = BigRational::new(1.into(), 2.into());
    let t = (half - num_traits::pow(rho.clone(), i)) * BigRational::from_integer(n.into());
    BigRational::from_integer(size.into()) >= t
}

fn parts(g: &DisjointnessGraph, side: Side) -> (BipartiteGraph, &SetFamily) {
    match side {
        Side::Left => (g.graph().clone(), g.left()),
        Side::Right => (g.graph().transpose(), g.right()),
    }
}

/// Grows the tuple one set at a time, taking the admissible extension with
/// the largest (neighbourhood, union) pair, ties to the lower index.
pub fn grow_tuple(g: &DisjointnessGraph, side: Side, eps: f64, rho: f64) -> Result<TupleWitness> {
    if !(eps > 0.0 && eps <= 1.0) || !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParams("need eps in (0, 1] and rho in (0, 1)".into()));
    }
    let (bg, fam) = parts(g, side);
    if fam.is_empty() || bg.right_len() == 0 {
        return Err(Error::EmptyFamily);
    }
    let (eq, rq) = (f64_to_rational(eps), f64_to_rational(rho));
    let n = fam.universe();
    let other = bg.right_len();

    let mut indices = Vec::new();
    let mut nb_sizes = Vec::new();
    let mut un_sizes = Vec::new();
    let mut common = BitSet::full(other);
    let mut union = BitSet::new(n);
    let mut fallback = false;
    loop {
        let i = indices.len() + 1;
        let mut best: Option<(usize, usize, usize)> = None;
        for c in 0..fam.len() {
            if indices.contains(&c) {
                continue;
            }
            let nb = common.intersection_len(bg.row(c));
            let un = union.union(fam.get(c)).len();
            if !neighborhood_ok(nb, i, &eq, other) || !union_ok(un, i, &rq, n) {
                continue;
            }
            if best.is_none_or(|(_, bn, bu)| (nb, un) > (bn, bu)) {
                best = Some((c, nb, un));
            }
        }
        let Some((c, nb, un)) = best else { break };
        indices.push(c);
        nb_sizes.push(nb);
        un_sizes.push(un);
        common.intersect_with(bg.row(c));
        union.union_with(fam.get(c));
    }
    if indices.is_empty() {
        // any single set is a valid 1-tuple once the graph is cleaned
        let c = (0..fam.len())
            .max_by(|&x, &y| bg.degree_left(x).cmp(&bg.degree_left(y)).then(y.cmp(&x)))
            .expect("nonempty");
        indices.push(c);
        nb_sizes.push(bg.degree_left(c));
        un_sizes.push(fam.get(c).len());
        fallback = true;
    }
    Ok(TupleWitness {
        side,
        indices,
        neighborhood_sizes: nb_sizes,
        union_sizes: un_sizes,
        eps,
        rho,
        fallback,
    })
}

impl TupleWitness {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Recomputes every prefix from the graph and checks the recorded sizes
    /// and both thresholds. A fallback witness is only checked for sizes.
    pub fn verify(&self, g: &DisjointnessGraph) -> bool {
        let (bg, fam) = parts(g, self.side);
        let (eq, rq) = (f64_to_rational(self.eps), f64_to_rational(self.rho));
        let other = bg.right_len();
        let mut common = BitSet::full(other);
        let mut union = BitSet::new(fam.universe());
        let mut seen = Vec::new();
        for (k, &c) in self.indices.iter().enumerate() {
            if c >= fam.len() || seen.contains(&c) {
                return false;
            }
            seen.push(c);
            common.intersect_with(bg.row(c));
            union.union_with(fam.get(c));
            let (nb, un) = (common.len(), union.len());
            if nb != self.neighborhood_sizes[k] || un != self.union_sizes[k] {
                return false;
            }
            if !self.fallback
                && (!neighborhood_ok(nb, k + 1, &eq, other) || !union_ok(un, k + 1, &rq, fam.universe()))
            {
                return false;
            }
        }
        !self.indices.is_empty()
    }
}

/// `0.9^8 < 1/2`, checked in exact arithmetic.
pub fn rho_power_fact() -> bool {
    let r = BigRational::new(9.into(), 10.into());
    num_traits::pow(r, 8) < BigRational::one() / BigRational::from_integer(2.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::famcore::build_graph;

    #[test]
    fn complete_bipartite_pair() {
        let a = SetFamily::power_set_of(4, &[1, 2]).unwrap();
        let b = SetFamily::power_set_of(4, &[3, 4]).unwrap();
        let g = build_graph(&a, &b).unwrap();
        let w = grow_tuple(&g, Side::Left, 1.0, 0.9).unwrap();
        assert!(!w.is_empty());
        assert!(!w.fallback);
        assert!(w.verify(&g));
        let w = grow_tuple(&g, Side::Right, 1.0, 0.9).unwrap();
        assert!(w.verify(&g));
    }

    #[test]
    fn single_edge() {
        let a = SetFamily::from_one_based(2, &[vec![1]]).unwrap();
        let b = SetFamily::from_one_based(2, &[vec![2]]).unwrap();
        let g = build_graph(&a, &b).unwrap();
        let w = grow_tuple(&g, Side::Left, 1.0, 0.9).unwrap();
        assert_eq!(w.indices, vec![0]);
        assert_eq!(w.neighborhood_sizes, vec![1]);
        assert!(w.verify(&g));
    }

    #[test]
    fn tampered_witness_fails() {
        let p = SetFamily::power_set(3);
        let g = build_graph(&p, &p).unwrap();
        let mut w = grow_tuple(&g, Side::Left, 0.5, 0.9).unwrap();
        assert!(w.verify(&g));
        w.union_sizes[0] += 1;
        assert!(!w.verify(&g));
    }

    #[test]
    fn rho_fact() {
        assert!(rho_power_fact());
    }
}
