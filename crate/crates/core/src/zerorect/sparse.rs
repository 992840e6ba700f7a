use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{mean, DenseMatrix, SubmatrixSelection};

/// Bipartite graph on the rows and columns of a matrix, restricted to
/// surviving vertex sets.
struct Graph<'a> {
    edge: Box<dyn Fn(usize, usize) -> bool + 'a>,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Graph<'_> {
    fn row_neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.cols.iter().copied().filter(move |&j| (self.edge)(i, j))
    }

    fn col_neighbours(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().copied().filter(move |&i| (self.edge)(i, j))
    }

    /// Greedy maximal induced matching among the `candidate` edges, scanned
    /// in row-major order. Returns the matching with the rows and columns
    /// adjacent to it; every candidate edge outside those sets could extend
    /// the matching, so none remains.
    fn induced_matching(
        &self,
        candidate: impl Fn(usize, usize) -> bool,
        m: usize,
        n: usize,
    ) -> (Vec<(usize, usize)>, Vec<bool>, Vec<bool>) {
        let mut blocked_rows = vec![false; m];
        let mut blocked_cols = vec![false; n];
        let mut matching = Vec::new();
        for &i in &self.rows {
            if blocked_rows[i] {
                continue;
            }
            for &j in &self.cols {
                if blocked_cols[j] || !candidate(i, j) {
                    continue;
                }
                matching.push((i, j));
                blocked_rows[i] = true;
                blocked_cols[j] = true;
                for k in self.col_neighbours(j) {
                    blocked_rows[k] = true;
                }
                for k in self.row_neighbours(i) {
                    blocked_cols[k] = true;
                }
                break;
            }
        }
        (matching, blocked_rows, blocked_cols)
    }
}

fn degrees(m: &DenseMatrix, edge: &dyn Fn(usize, usize) -> bool) -> (Vec<usize>, Vec<usize>) {
    let mut rd = vec![0; m.rows()];
    let mut cd = vec![0; m.cols()];
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if edge(i, j) {
                rd[i] += 1;
                cd[j] += 1;
            }
        }
    }
    (rd, cd)
}

/// Outcome of bounding a non-negative matrix by `Δ·p` on a large submatrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Regularization {
    pub selection: SubmatrixSelection,
    /// Entry cap `400r²p` that holds on the selection.
    pub cap: f64,
    /// Size of the induced matching of heavy entries that was removed.
    pub matching: usize,
    pub rank: usize,
}

/// Submatrix with at least `0.9m` rows and `0.9n` columns on which every
/// entry is below `400r²p`, where `r` bounds the rank and `p` is the mean.
///
/// Rows and columns with many entries `≥ 400rp` are dropped; the heavy
/// entries among the rest are cut out through a maximal induced matching,
/// whose size cannot exceed the rank.
pub fn regularize_bounded(m: &DenseMatrix, rank: usize) -> Result<Regularization> {
    let m_f = m.to_f64_vec();
    if m_f.iter().any(|&x| x < 0.0) {
        return Err(Error::PreconditionFailed("matrix has negative entries".into()));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let p = if m.is_empty() { 0.0 } else { mean(m) };
    if p == 0.0 {
        return Ok(Regularization {
            selection: SubmatrixSelection::full(rows, cols),
            cap: 0.0,
            matching: 0,
            rank,
        });
    }
    let r = rank.max(1) as f64;
    let light_cap = 400.0 * r * p;
    let cap = 400.0 * r * r * p;
    let at = |i: usize, j: usize| m_f[i * cols + j];
    let edge = |i: usize, j: usize| at(i, j) >= light_cap;
    let (rd, cd) = degrees(m, &edge);
    let row_limit = cols as f64 / (20.0 * r);
    let col_limit = rows as f64 / (20.0 * r);
    let graph = Graph {
        edge: Box::new(edge),
        rows: (0..rows).filter(|&i| rd[i] as f64 <= row_limit).collect(),
        cols: (0..cols).filter(|&j| cd[j] as f64 <= col_limit).collect(),
    };
    let (matching, blocked_rows, blocked_cols) = graph.induced_matching(|i, j| at(i, j) >= cap, rows, cols);
    if matching.len() > rank {
        return Err(Error::RankContradiction {
            matching: matching.len(),
            rank,
        });
    }
    let sel = SubmatrixSelection::new(
        graph.rows.iter().copied().filter(|&i| !blocked_rows[i]).collect(),
        graph.cols.iter().copied().filter(|&j| !blocked_cols[j]).collect(),
    );
    debug_assert!(sel.rows.iter().all(|&i| sel.cols.iter().all(|&j| at(i, j) < cap)));
    let (h, w) = sel.shape();
    if (h as f64) < 0.9 * rows as f64 || (w as f64) < 0.9 * cols as f64 {
        return Err(Error::RankContradiction {
            matching: matching.len(),
            rank,
        });
    }
    Ok(Regularization {
        selection: sel,
        cap,
        matching: matching.len(),
        rank,
    })
}

/// All-zero submatrix found inside a sparse matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseExtraction {
    pub selection: SubmatrixSelection,
    /// Size of the induced matching of non-zero entries that was removed.
    pub matching: usize,
    pub nonzeros: usize,
}

/// Zero submatrix with at least `m/2` rows and `n/2` columns of a matrix of
/// rank at most `rank` with at most `mn/(16·rank)` non-zero entries.
pub fn sparse_zero_extract(m: &DenseMatrix, rank: usize) -> Result<SparseExtraction> {
    let (rows, cols) = (m.rows(), m.cols());
    let nnz = m.count_nonzero();
    if nnz == 0 {
        return Ok(SparseExtraction {
            selection: SubmatrixSelection::full(rows, cols),
            matching: 0,
            nonzeros: 0,
        });
    }
    if rank == 0 {
        return Err(Error::RankContradiction { matching: 1, rank });
    }
    let r = rank as f64;
    let limit = (rows * cols) as f64 / (16.0 * r);
    if nnz as f64 > limit {
        return Err(Error::TooDense { nnz, limit });
    }
    let edge = |i: usize, j: usize| !m.is_zero_at(i, j);
    let (rd, cd) = degrees(m, &edge);
    let row_limit = cols as f64 / (4.0 * r);
    let col_limit = rows as f64 / (4.0 * r);
    let graph = Graph {
        edge: Box::new(edge),
        rows: (0..rows).filter(|&i| rd[i] as f64 <= row_limit).collect(),
        cols: (0..cols).filter(|&j| cd[j] as f64 <= col_limit).collect(),
    };
    let (matching, blocked_rows, blocked_cols) = graph.induced_matching(edge, rows, cols);
    if matching.len() > rank {
        return Err(Error::RankContradiction {
            matching: matching.len(),
            rank,
        });
    }
    let sel = SubmatrixSelection::new(
        graph.rows.iter().copied().filter(|&i| !blocked_rows[i]).collect(),
        graph.cols.iter().copied().filter(|&j| !blocked_cols[j]).collect(),
    );
    if !m.is_zero_on(&sel) {
        return Err(Error::VerificationFailed("sparse extraction left a non-zero entry".into()));
    }
    Ok(SparseExtraction {
        selection: sel,
        matching: matching.len(),
        nonzeros: nnz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `n × n` matrix whose first `k` diagonal entries are one.
    fn diagonal_prefix(n: usize, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |i, j| if i == j && i < k { 1.0 } else { 0.0 })
    }

    #[test]
    fn zero_matrix_keeps_everything() {
        let z = DenseMatrix::zeros(5, 7);
        let s = sparse_zero_extract(&z, 0).unwrap();
        assert_eq!(s.selection, SubmatrixSelection::full(5, 7));
        let reg = regularize_bounded(&z, 3).unwrap();
        assert_eq!(reg.selection, SubmatrixSelection::full(5, 7));
    }

    #[test]
    fn single_one_leaves_two_by_two_or_more() {
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[1][2] = 1.0;
        let m = DenseMatrix::from_rows(&rows).unwrap();
        // 1 non-zero against the limit 16/16 = 1.
        let s = sparse_zero_extract(&m, 1).unwrap();
        assert!(m.is_zero_on(&s.selection));
        let (h, w) = s.selection.shape();
        assert!(h >= 2 && w >= 2);
    }

    #[test]
    fn identity_corner_in_eight_by_eight() {
        let m = diagonal_prefix(8, 2);
        let s = sparse_zero_extract(&m, 2).unwrap();
        assert!(m.is_zero_on(&s.selection));
        let (h, w) = s.selection.shape();
        assert!(h >= 4 && w >= 4, "got {h}x{w}");
        assert!(s.matching <= 2);
    }

    #[test]
    fn identity_is_too_dense() {
        let m = DenseMatrix::identity(4);
        assert!(matches!(sparse_zero_extract(&m, 4), Err(Error::TooDense { nnz: 4, .. })));
    }

    #[test]
    fn rank_bound_that_is_too_small_is_detected() {
        // Diagonal of 4 ones in 64x64: the induced matching has 4 edges.
        let m = diagonal_prefix(64, 4);
        assert!(matches!(
            sparse_zero_extract(&m, 1),
            Err(Error::RankContradiction { matching: 4, rank: 1 })
        ));
    }

    #[test]
    fn regularize_caps_entries() {
        // One huge spike on a background of ones.
        let mut m = vec![vec![1.0; 50]; 50];
        m[3][7] = 1e9;
        let m = DenseMatrix::from_rows(&m).unwrap();
        let reg = regularize_bounded(&m, 2).unwrap();
        let (h, w) = reg.selection.shape();
        assert!(h >= 45 && w >= 45);
        let sub = m.submatrix(&reg.selection).unwrap();
        assert!(sub.to_f64_vec().iter().all(|&x| x < reg.cap));
        assert!(!reg.selection.rows.contains(&3) || !reg.selection.cols.contains(&7));
    }

    #[test]
    fn regularize_rejects_negative_entries() {
        let m = DenseMatrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        assert!(matches!(regularize_bounded(&m, 1), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn large_single_entry_postcondition() {
        // 8x8 zero matrix with one entry 10^6 and rank 1: the mean is large
        // enough that no entry reaches 400rp, so nothing needs removing.
        let mut d = vec![0.0; 64];
        d[0] = 1e6;
        let m = DenseMatrix::from_f64(8, 8, d).unwrap();
        let reg = regularize_bounded(&m, 1).unwrap();
        let p = mean(&m);
        let sub = m.submatrix(&reg.selection).unwrap();
        assert!(sub.to_f64_vec().iter().all(|&x| x < 400.0 * p));
        assert_eq!(reg.selection.shape(), (8, 8));
    }

    #[test]
    fn identity_keeps_full_selection() {
        let reg = regularize_bounded(&DenseMatrix::identity(5), 5).unwrap();
        assert_eq!(reg.selection, SubmatrixSelection::full(5, 5));
    }
}
