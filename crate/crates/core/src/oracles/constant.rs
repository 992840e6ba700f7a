use std::collections::HashMap;

use num_rational::BigRational;
use serde::Serialize;

use super::budget::OracleBudget;
use super::rect::{Objective, RectProblem, RectSolution};
use crate::error::Result;
use crate::famcore::BitSet;
use crate::matcore::{DenseMatrix, SubmatrixSelection};

/// Largest constant submatrix found by an exact search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantBlock {
    /// Side for square searches, area for area searches.
    pub size: usize,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub value: BigRational,
    pub selection: SubmatrixSelection,
}

/// Matrix with duplicate rows and columns collapsed and values interned.
struct Collapsed {
    values: Vec<BigRational>,
    /// `cells[r][c]` is the value id at row class `r`, column class `c`.
    cells: Vec<Vec<usize>>,
    row_members: Vec<Vec<usize>>,
    col_members: Vec<Vec<usize>>,
}

fn collapse(m: &DenseMatrix) -> Collapsed {
    let mut ids: HashMap<BigRational, usize> = HashMap::new();
    let mut values = Vec::new();
    let raw: Vec<Vec<usize>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let v = m.get_exact(i, j);
                    *ids.entry(v.clone()).or_insert_with(|| {
                        values.push(v);
                        values.len() - 1
                    })
                })
                .collect()
        })
        .collect();

    let mut col_key: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut col_members: Vec<Vec<usize>> = Vec::new();
    let mut col_class = vec![0; m.cols()];
    for j in 0..m.cols() {
        let key: Vec<usize> = raw.iter().map(|r| r[j]).collect();
        let k = *col_key.entry(key).or_insert_with(|| {
            col_members.push(Vec::new());
            col_members.len() - 1
        });
        col_members[k].push(j);
        col_class[j] = k;
    }
    let reps: Vec<usize> = col_members.iter().map(|c| c[0]).collect();

    let mut row_key: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut row_members: Vec<Vec<usize>> = Vec::new();
    let mut cells = Vec::new();
    for (i, r) in raw.iter().enumerate() {
        let key: Vec<usize> = reps.iter().map(|&j| r[j]).collect();
        let k = *row_key.entry(key.clone()).or_insert_with(|| {
            row_members.push(Vec::new());
            cells.push(key);
            row_members.len() - 1
        });
        row_members[k].push(i);
    }
    Collapsed {
        values,
        cells,
        row_members,
        col_members,
    }
}

impl Collapsed {
    fn problem(&self, value: usize) -> RectProblem {
        let ncols = self.col_members.len();
        RectProblem {
            patterns: self
                .cells
                .iter()
                .map(|r| BitSet::from_indices(ncols, (0..ncols).filter(|&c| r[c] == value)).unwrap())
                .collect(),
            row_weights: self.row_members.iter().map(|m| m.len() as u64).collect(),
            col_weights: self.col_members.iter().map(|m| m.len() as u64).collect(),
        }
    }

    fn expand(&self, sol: &RectSolution, rows: Option<usize>, cols: Option<usize>) -> SubmatrixSelection {
        let mut r: Vec<usize> = sol.rows.iter().flat_map(|&k| self.row_members[k].iter().copied()).collect();
        let mut c: Vec<usize> = sol.cols.iter().flat_map(|&k| self.col_members[k].iter().copied()).collect();
        r.sort_unstable();
        c.sort_unstable();
        if let Some(k) = rows {
            r.truncate(k);
        }
        if let Some(k) = cols {
            c.truncate(k);
        }
        SubmatrixSelection::new(r, c)
    }

    fn value_ids(&self, value: Option<&BigRational>) -> Vec<usize> {
        match value {
            Some(v) => self.values.iter().position(|x| x == v).into_iter().collect(),
            None => (0..self.values.len()).collect(),
        }
    }

    fn check(&self, budget: &OracleBudget, what: &'static str) -> Result<()> {
        budget.check_dims(what, self.row_members.len(), self.col_members.len())
    }
}

/// Largest `s` such that some `s × s` submatrix has every entry equal to
/// `value` (or to one common value when `value` is `None`).
///
/// The budget applies to the numbers of distinct rows and columns.
pub fn max_constant_square(
    m: &DenseMatrix,
    value: Option<&BigRational>,
    budget: &OracleBudget,
) -> Result<Option<ConstantBlock>> {
    let col = collapse(m);
    col.check(budget, "constant square search")?;
    let mut best: Option<ConstantBlock> = None;
    for v in col.value_ids(value) {
        let floor = best.as_ref().map_or(0, |b| b.size as u128);
        if let Some(sol) = col.problem(v).solve(Objective::Square, floor) {
            let s = sol.score as usize;
            best = Some(ConstantBlock {
                size: s,
                value: col.values[v].clone(),
                selection: col.expand(&sol, Some(s), Some(s)),
            });
        }
    }
    if let Some(b) = &best {
        assert!(certify(m, &b.selection, &b.value), "constant square failed re-check");
    }
    Ok(best)
}

/// Largest-area constant rectangle with the given value (or any value).
pub fn max_constant_rectangle(
    m: &DenseMatrix,
    value: Option<&BigRational>,
    budget: &OracleBudget,
) -> Result<Option<ConstantBlock>> {
    let col = collapse(m);
    col.check(budget, "constant rectangle search")?;
    let mut best: Option<ConstantBlock> = None;
    for v in col.value_ids(value) {
        let floor = best.as_ref().map_or(0, |b| b.size as u128);
        if let Some(sol) = col.problem(v).solve(Objective::Area, floor) {
            best = Some(ConstantBlock {
                size: sol.score as usize,
                value: col.values[v].clone(),
                selection: col.expand(&sol, None, None),
            });
        }
    }
    if let Some(b) = &best {
        assert!(certify(m, &b.selection, &b.value), "constant rectangle failed re-check");
    }
    Ok(best)
}

/// Some constant submatrix with at least `rows × cols` cells, if one exists.
pub fn find_constant_rectangle(
    m: &DenseMatrix,
    rows: usize,
    cols: usize,
    value: Option<&BigRational>,
    budget: &OracleBudget,
) -> Result<Option<(SubmatrixSelection, BigRational)>> {
    let col = collapse(m);
    col.check(budget, "constant rectangle search")?;
    for v in col.value_ids(value) {
        let obj = Objective::Threshold {
            rows: rows as u64,
            cols: cols as u64,
        };
        if let Some(sol) = col.problem(v).solve(obj, 0) {
            let sel = col.expand(&sol, Some(rows.max(1)), Some(cols.max(1)));
            return Ok(Some((sel, col.values[v].clone())));
        }
    }
    Ok(None)
}

/// Entry-by-entry check that the selection is constant with `value`.
pub fn certify(m: &DenseMatrix, sel: &SubmatrixSelection, value: &BigRational) -> bool {
    sel.rows
        .iter()
        .all(|&i| sel.cols.iter().all(|&j| &m.get_exact(i, j) == value))
}
