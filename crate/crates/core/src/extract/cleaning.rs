use serde::Serialize;

use crate::error::{Error, Result};
use crate::famcore::{BipartiteGraph, BitSet, DisjointnessGraph};

/// Vertex sets left after repeated removal of low-degree vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CleanedSides {
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub left: Vec<usize>,
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub right: Vec<usize>,
    pub passes: usize,
}

/// Removes, pass after pass, every left vertex with fewer than `ε|Y|/4`
/// surviving neighbours and every right vertex with fewer than `ε|X|/4`,
/// all deficient vertices of a pass at once. Thresholds use the original
/// side sizes.
pub fn clean_min_degree(g: &BipartiteGraph, eps: f64) -> Result<CleanedSides> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParams(format!("epsilon {eps} is outside (0, 1]")));
    }
    let (nx, ny) = (g.left_len(), g.right_len());
    let total = nx as f64 * ny as f64;
    let edges = g.edge_count() as f64;
    if total == 0.0 || edges < eps * total {
        return Err(Error::DensityTooLow {
            density: if total == 0.0 { 0.0 } else { edges / total },
            epsilon: eps,
        });
    }
    let tx = eps * ny as f64 / 4.0;
    let ty = eps * nx as f64 / 4.0;
    let mut xs = BitSet::full(nx);
    let mut ys = BitSet::full(ny);
    let mut passes = 0;
    loop {
        let drop_x: Vec<usize> = xs
            .iter()
            .filter(|&i| (g.row(i).intersection_len(&ys) as f64) < tx)
            .collect();
        let drop_y: Vec<usize> = ys
            .iter()
            .filter(|&j| (g.col(j).intersection_len(&xs) as f64) < ty)
            .collect();
        if drop_x.is_empty() && drop_y.is_empty() {
            break;
        }
        passes += 1;
        for i in drop_x {
            xs.remove(i);
        }
        for j in drop_y {
            ys.remove(j);
        }
    }
    let out = CleanedSides {
        left: xs.iter().collect(),
        right: ys.iter().collect(),
        passes,
    };
    check_cleaned(g, eps, &out)?;
    Ok(out)
}

/// The three guarantees: product size, and both minimum-degree bounds.
pub fn check_cleaned(g: &BipartiteGraph, eps: f64, c: &CleanedSides) -> Result<()> {
    let (nx, ny) = (g.left_len() as f64, g.right_len() as f64);
    let xs = BitSet::from_indices(g.left_len(), c.left.iter().copied())?;
    let ys = BitSet::from_indices(g.right_len(), c.right.iter().copied())?;
    if (c.left.len() as f64) * (c.right.len() as f64) < eps / 2.0 * nx * ny {
        return Err(Error::VerificationFailed("cleaned sides are too small".into()));
    }
    if c.left.iter().any(|&i| (g.row(i).intersection_len(&ys) as f64) < eps * ny / 4.0) {
        return Err(Error::VerificationFailed("left minimum degree violated".into()));
    }
    if c.right.iter().any(|&j| (g.col(j).intersection_len(&xs) as f64) < eps * nx / 4.0) {
        return Err(Error::VerificationFailed("right minimum degree violated".into()));
    }
    Ok(())
}

pub fn clean_disjointness_graph(g: &DisjointnessGraph, eps: f64) -> Result<CleanedSides> {
    clean_min_degree(g.graph(), eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_is_untouched() {
        let g = BipartiteGraph::complete(3, 5);
        let c = clean_min_degree(&g, 1.0).unwrap();
        assert_eq!(c.left, vec![0, 1, 2]);
        assert_eq!(c.right.len(), 5);
        assert_eq!(c.passes, 0);
    }

    #[test]
    fn perfect_matching() {
        let g = BipartiteGraph::from_edges(4, 4, &[(0, 0), (1, 1), (2, 2), (3, 3)]);
        let c = clean_min_degree(&g, 0.25).unwrap();
        check_cleaned(&g, 0.25, &c).unwrap();
        assert_eq!(c.left.len(), 4);
    }

    #[test]
    fn empty_graph_is_too_sparse() {
        let g = BipartiteGraph::from_edges(3, 3, &[]);
        assert!(matches!(clean_min_degree(&g, 0.5), Err(Error::DensityTooLow { .. })));
    }

    #[test]
    fn strips_pendant_vertices() {
        // complete 8x8 block plus one pendant edge; thresholds are 1.8
        let mut edges = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                edges.push((i, j));
            }
        }
        edges.push((8, 8));
        let g = BipartiteGraph::from_edges(9, 9, &edges);
        let c = clean_min_degree(&g, 0.8).unwrap();
        assert_eq!(c.left, (0..8).collect::<Vec<_>>());
        assert_eq!(c.right, (0..8).collect::<Vec<_>>());
    }
}
