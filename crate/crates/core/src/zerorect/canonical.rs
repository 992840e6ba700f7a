use std::collections::HashMap;

use num_rational::BigRational;

use crate::matcore::{DenseMatrix, SubmatrixSelection};

/// Assigns dense ids to signatures in sorted order, so ids depend only on
/// the signatures and not on where they occur.
fn rank_signatures<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    sigs.iter().map(|s| sorted.binary_search(s).unwrap()).collect()
}

/// Row and column orders obtained by colour refinement: each line is
/// coloured by the multiset of (opposite colour, value) pairs it meets,
/// until the colouring stops splitting. Lines are then listed by colour,
/// with ties broken by index.
///
/// Permuting the input permutes lines within colour classes only, so the
/// ordered matrix is the same for every permutation whenever each colour
/// class is a set of interchangeable lines.
pub(crate) fn refinement_order(m: &DenseMatrix) -> (Vec<usize>, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let exact = m.to_rational_vec();
    let value_ids = {
        let mut distinct: Vec<&BigRational> = exact.iter().collect();
        distinct.sort();
        distinct.dedup();
        let index: HashMap<&BigRational, usize> = distinct.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        exact.iter().map(|v| index[v]).collect::<Vec<usize>>()
    };
    let at = |i: usize, j: usize| value_ids[i * cols + j];
    let mut row_colour = vec![0usize; rows];
    let mut col_colour = vec![0usize; cols];
    let classes = |c: &[usize]| c.iter().max().map_or(0, |x| x + 1);
    loop {
        let (before_r, before_c) = (classes(&row_colour), classes(&col_colour));
        let row_sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..rows)
            .map(|i| {
                let mut s: Vec<(usize, usize)> = (0..cols).map(|j| (col_colour[j], at(i, j))).collect();
                s.sort_unstable();
                (row_colour[i], s)
            })
            .collect();
        row_colour = rank_signatures(&row_sigs);
        let col_sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..cols)
            .map(|j| {
                let mut s: Vec<(usize, usize)> = (0..rows).map(|i| (row_colour[i], at(i, j))).collect();
                s.sort_unstable();
                (col_colour[j], s)
            })
            .collect();
        col_colour = rank_signatures(&col_sigs);
        if classes(&row_colour) == before_r && classes(&col_colour) == before_c {
            break;
        }
    }
    let order = |colour: &[usize]| {
        let mut idx: Vec<usize> = (0..colour.len()).collect();
        idx.sort_by_key(|&i| (colour[i], i));
        idx
    };
    (order(&row_colour), order(&col_colour))
}

/// The input with lines listed in refinement order, plus the maps back.
pub(crate) struct Canonical {
    pub matrix: DenseMatrix,
    row_order: Vec<usize>,
    col_order: Vec<usize>,
}

impl Canonical {
    pub fn new(m: &DenseMatrix) -> Self {
        let (row_order, col_order) = refinement_order(m);
        let inverse = |order: &[usize]| {
            let mut inv = vec![0; order.len()];
            for (k, &i) in order.iter().enumerate() {
                inv[i] = k;
            }
            inv
        };
        let matrix = m.permuted(&inverse(&row_order), &inverse(&col_order));
        Canonical {
            matrix,
            row_order,
            col_order,
        }
    }

    /// Selection in the original indexing.
    pub fn restore(&self, sel: &SubmatrixSelection) -> SubmatrixSelection {
        SubmatrixSelection::new(
            sel.rows.iter().map(|&k| self.row_order[k]).collect(),
            sel.cols.iter().map(|&k| self.col_order[k]).collect(),
        )
    }
}
