use rayon::prelude::*;

use super::bitset::BitSet;
use super::family::SetFamily;
use crate::error::Result;

/// Bipartite graph with bitset adjacency kept in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    rows: Vec<BitSet>,
    cols: Vec<BitSet>,
}

impl BipartiteGraph {
    /// `rows[i]` is the neighbourhood of left vertex `i` over `0..right`.
    pub fn from_rows(right: usize, rows: Vec<BitSet>) -> Self {
        let left = rows.len();
        let mut cols = vec![BitSet::new(left); right];
        for (i, r) in rows.iter().enumerate() {
            debug_assert_eq!(r.universe(), right);
            for j in r.iter() {
                cols[j].insert(i);
            }
        }
        BipartiteGraph { rows, cols }
    }

    pub fn complete(left: usize, right: usize) -> Self {
        Self::from_rows(right, vec![BitSet::full(right); left])
    }

    pub fn from_edges(left: usize, right: usize, edges: &[(usize, usize)]) -> Self {
        let mut rows = vec![BitSet::new(right); left];
        for &(i, j) in edges {
            rows[i].insert(j);
        }
        Self::from_rows(right, rows)
    }

    #[inline]
    pub fn left_len(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn right_len(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn row(&self, i: usize) -> &BitSet {
        &self.rows[i]
    }

    pub fn col(&self, j: usize) -> &BitSet {
        &self.cols[j]
    }

    pub fn edge_count(&self) -> u128 {
        self.rows.iter().map(|r| r.len() as u128).sum()
    }

    pub fn degree_left(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn degree_right(&self, j: usize) -> usize {
        self.cols[j].len()
    }

    /// Right vertices adjacent to every left vertex in `left`.
    /// An empty `left` gives the whole right side.
    pub fn common_neighbors_of_left(&self, left: &[usize]) -> BitSet {
        let mut acc = BitSet::full(self.right_len());
        for &i in left {
            acc.intersect_with(&self.rows[i]);
        }
        acc
    }

    pub fn common_neighbors_of_right(&self, right: &[usize]) -> BitSet {
        let mut acc = BitSet::full(self.left_len());
        for &j in right {
            acc.intersect_with(&self.cols[j]);
        }
        acc
    }

    pub fn transpose(&self) -> BipartiteGraph {
        BipartiteGraph {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    /// Edges between the given vertex subsets.
    pub fn edges_between(&self, left: &BitSet, right: &BitSet) -> u128 {
        left.iter()
            .map(|i| self.rows[i].intersection_len(right) as u128)
            .sum()
    }
}

/// Disjointness graph of two families: left `i` and right `j` are adjacent
/// iff the sets are disjoint.
#[derive(Clone, Debug)]
pub struct DisjointnessGraph {
    left: SetFamily,
    right: SetFamily,
    graph: BipartiteGraph,
}

pub fn build_graph(a: &SetFamily, b: &SetFamily) -> Result<DisjointnessGraph> {
    a.check_same_universe(b)?;
    let rows: Vec<BitSet> = a
        .sets()
        .par_iter()
        .map(|x| {
            let mut row = BitSet::new(b.len());
            for (j, y) in b.iter().enumerate() {
                if x.is_disjoint(y) {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    Ok(DisjointnessGraph {
        left: a.clone(),
        right: b.clone(),
        graph: BipartiteGraph::from_rows(b.len(), rows),
    })
}

impl DisjointnessGraph {
    pub fn left(&self) -> &SetFamily {
        &self.left
    }

    pub fn right(&self) -> &SetFamily {
        &self.right
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn edge_count(&self) -> u128 {
        self.graph.edge_count()
    }

    pub fn degree_left(&self, i: usize) -> usize {
        self.graph.degree_left(i)
    }

    pub fn degree_right(&self, j: usize) -> usize {
        self.graph.degree_right(j)
    }

    pub fn common_neighbors_of_left(&self, left: &[usize]) -> BitSet {
        self.graph.common_neighbors_of_left(left)
    }

    pub fn common_neighbors_of_right(&self, right: &[usize]) -> BitSet {
        self.graph.common_neighbors_of_right(right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::famcore::disjoint_pairs;

    #[test]
    fn single_edge() {
        let a = SetFamily::from_one_based(2, &[vec![1]]).unwrap();
        let b = SetFamily::from_one_based(2, &[vec![2]]).unwrap();
        let g = build_graph(&a, &b).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn power_set_graph() {
        let p = SetFamily::power_set(2);
        let g = build_graph(&p, &p).unwrap();
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.edge_count(), disjoint_pairs(&p, &p).unwrap().count);
        // left sets {1} and {2} sit at mask positions 1 and 2
        let common = g.common_neighbors_of_left(&[1, 2]);
        assert_eq!(common.iter().collect::<Vec<_>>(), vec![0]);
        assert!(p.get(0).is_empty());
    }

    #[test]
    fn transpose_swaps_sides() {
        let g = BipartiteGraph::from_edges(2, 3, &[(0, 2), (1, 0)]);
        let t = g.transpose();
        assert!(t.has_edge(2, 0));
        assert_eq!(t.degree_left(0), 1);
        assert_eq!(t.edge_count(), 2);
    }
}
