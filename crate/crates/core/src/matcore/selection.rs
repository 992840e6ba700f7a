use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row and column index sets (0-based, sorted, distinct) naming `M[A×B]`.
/// Serialized 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "SelectionFile", try_from = "SelectionFile")]
pub struct SubmatrixSelection {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SelectionFile {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl From<SubmatrixSelection> for SelectionFile {
    fn from(s: SubmatrixSelection) -> Self {
        SelectionFile {
            rows: s.rows_one_based(),
            cols: s.cols_one_based(),
        }
    }
}

impl TryFrom<SelectionFile> for SubmatrixSelection {
    type Error = Error;

    fn try_from(f: SelectionFile) -> Result<Self> {
        let down = |v: Vec<usize>| {
            v.into_iter()
                .map(|i| i.checked_sub(1).ok_or_else(|| Error::Parse("selection indices are 1-based".into())))
                .collect::<Result<Vec<_>>>()
        };
        Ok(SubmatrixSelection::new(down(f.rows)?, down(f.cols)?))
    }
}

impl SubmatrixSelection {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        SubmatrixSelection { rows, cols }
    }

    pub fn full(m: usize, n: usize) -> Self {
        SubmatrixSelection {
            rows: (0..m).collect(),
            cols: (0..n).collect(),
        }
    }

    pub fn empty() -> Self {
        SubmatrixSelection {
            rows: Vec::new(),
            cols: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    /// Side of the largest square inside the selection.
    pub fn side(&self) -> usize {
        self.rows.len().min(self.cols.len())
    }

    pub fn area(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    /// Maps a selection made inside `self`'s submatrix back to outer indices.
    pub fn compose(&self, inner: &SubmatrixSelection) -> SubmatrixSelection {
        SubmatrixSelection {
            rows: inner.rows.iter().map(|&i| self.rows[i]).collect(),
            cols: inner.cols.iter().map(|&j| self.cols[j]).collect(),
        }
    }

    /// Truncates to the first `side` rows and columns.
    pub fn square(&self) -> SubmatrixSelection {
        let s = self.side();
        SubmatrixSelection {
            rows: self.rows[..s].to_vec(),
            cols: self.cols[..s].to_vec(),
        }
    }

    pub fn check_bounds(&self, m: usize, n: usize) -> Result<()> {
        let sorted = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&self.rows) || !sorted(&self.cols) {
            return Err(Error::InvalidParams("selection indices must be sorted and distinct".into()));
        }
        if self.rows.last().is_some_and(|&i| i >= m) || self.cols.last().is_some_and(|&j| j >= n) {
            return Err(Error::InvalidParams(format!("selection out of range for {m}x{n}")));
        }
        Ok(())
    }

    pub fn rows_one_based(&self) -> Vec<usize> {
        self.rows.iter().map(|i| i + 1).collect()
    }

    pub fn cols_one_based(&self) -> Vec<usize> {
        self.cols.iter().map(|j| j + 1).collect()
    }
}
