use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard caps checked before any exponential enumeration starts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleBudget {
    pub max_rows: usize,
    pub max_cols: usize,
    pub max_family: usize,
    pub max_universe: usize,
    /// Cap on the number of subsets visited by plain enumerations.
    pub max_enumeration: u64,
    /// Optional cap on working memory for table-based routes.
    pub max_memory_bytes: Option<u64>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_rows: 12,
            max_cols: 12,
            max_family: 22,
            max_universe: 20,
            max_enumeration: 1 << 22,
            max_memory_bytes: None,
        }
    }
}

impl OracleBudget {
    /// Default caps for the branch-and-bound searches.
    pub fn branch_and_bound() -> Self {
        OracleBudget {
            max_rows: 20,
            max_cols: 20,
            ..Self::default()
        }
    }

    pub fn with_dims(rows: usize, cols: usize) -> Self {
        OracleBudget {
            max_rows: rows,
            max_cols: cols,
            ..Self::default()
        }
    }

    pub(crate) fn check_dims(&self, what: &'static str, rows: usize, cols: usize) -> Result<()> {
        if rows > self.max_rows {
            return Err(Error::BudgetExceeded {
                what,
                needed: rows as u128,
                limit: self.max_rows as u128,
            });
        }
        if cols > self.max_cols {
            return Err(Error::BudgetExceeded {
                what,
                needed: cols as u128,
                limit: self.max_cols as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_enumeration(&self, what: &'static str, count: u128) -> Result<()> {
        if count > self.max_enumeration as u128 {
            return Err(Error::BudgetExceeded {
                what,
                needed: count,
                limit: self.max_enumeration as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_memory(&self, what: &'static str, bytes: u128) -> Result<()> {
        match self.max_memory_bytes {
            Some(cap) if bytes > cap as u128 => Err(Error::BudgetExceeded {
                what,
                needed: bytes,
                limit: cap as u128,
            }),
            _ => Ok(()),
        }
    }
}
