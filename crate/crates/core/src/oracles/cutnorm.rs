use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::budget::OracleBudget;
use crate::error::Result;
use crate::matcore::{centered, DenseMatrix, SubmatrixSelection};

/// Exact maximum of `|Σ_{A×B} M|` over nonempty rectangles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutNormResult {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub value: BigRational,
    /// Signed entry sum of the witness rectangle; `|sum| = value`.
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub sum: BigRational,
    pub selection: SubmatrixSelection,
}

impl CutNormResult {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn cut_norm_exact(m: &DenseMatrix, budget: &OracleBudget) -> Result<CutNormResult> {
    budget.check_dims("cut norm enumeration", m.rows(), m.cols())?;
    // enumerate subsets of the shorter side
    let transposed = m.rows() > m.cols();
    let work = if transposed { m.transpose() } else { m.clone() };
    let (ints, den) = work.to_scaled_integers();
    let (rows, cols) = (work.rows(), work.cols());

    let abs_total: BigInt = ints.iter().map(|x| x.abs()).sum();
    let best = if abs_total.bits() < 120 {
        let small: Vec<i128> = ints.iter().map(|x| x.to_i128().expect("fits")).collect();
        let (v, s, a, b) = enumerate(&small, rows, cols);
        (BigInt::from(v), BigInt::from(s), a, b)
    } else {
        enumerate(&ints, rows, cols)
    };
    let (value, sum, row_mask, col_set) = best;
    let row_set: Vec<usize> = (0..rows).filter(|&i| row_mask >> i & 1 == 1).collect();
    let selection = if transposed {
        SubmatrixSelection::new(col_set, row_set)
    } else {
        SubmatrixSelection::new(row_set, col_set)
    };
    Ok(CutNormResult {
        value: BigRational::new(value, den.clone()),
        sum: BigRational::new(sum, den),
        selection,
    })
}

/// Cut norm of `M − mean(M)·J`, computed exactly.
pub fn disc_exact(m: &DenseMatrix, budget: &OracleBudget) -> Result<CutNormResult> {
    cut_norm_exact(&centered(&m.to_rational()), budget)
}

/// Returns `(value, signed sum, row mask, column list)`.
fn enumerate<T>(a: &[T], rows: usize, cols: usize) -> (T, T, u64, Vec<usize>)
where
    T: Clone + Zero + PartialOrd + for<'x> AddAssign<&'x T> + for<'x> SubAssign<&'x T>,
    for<'x> &'x T: std::ops::Neg<Output = T>,
{
    let mut colsum = vec![T::zero(); cols];
    let mut mask = 0u64;
    let mut best: Option<(T, bool, u64)> = None;
    for g in 1u64..1 << rows {
        let bit = g.trailing_zeros() as usize;
        let row = &a[bit * cols..(bit + 1) * cols];
        if mask >> bit & 1 == 0 {
            mask |= 1 << bit;
            for (c, x) in colsum.iter_mut().zip(row) {
                *c += x;
            }
        } else {
            mask &= !(1 << bit);
            for (c, x) in colsum.iter_mut().zip(row) {
                *c -= x;
            }
        }
        let mut pos = T::zero();
        let mut neg = T::zero();
        for c in &colsum {
            if *c > T::zero() {
                pos += c;
            } else {
                neg -= c;
            }
        }
        for (v, positive) in [(pos, true), (neg, false)] {
            if v > T::zero() && best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                best = Some((v, positive, mask));
            }
        }
    }
    let Some((value, positive, mask)) = best else {
        return (T::zero(), T::zero(), 1, vec![0]);
    };
    // recompute the column sums for the winning row set
    let mut colsum = vec![T::zero(); cols];
    for i in (0..rows).filter(|&i| mask >> i & 1 == 1) {
        for (c, x) in colsum.iter_mut().zip(&a[i * cols..(i + 1) * cols]) {
            *c += x;
        }
    }
    let b: Vec<usize> = (0..cols)
        .filter(|&j| {
            if positive {
                colsum[j] > T::zero()
            } else {
                colsum[j] < T::zero()
            }
        })
        .collect();
    let sum = if positive { value.clone() } else { -&value };
    (value, sum, mask, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn rect_sum(m: &DenseMatrix, s: &SubmatrixSelection) -> BigRational {
        let mut t = BigRational::zero();
        for &i in &s.rows {
            for &j in &s.cols {
                t += m.get_exact(i, j);
            }
        }
        t
    }

    #[test]
    fn identity_two() {
        let r = cut_norm_exact(&DenseMatrix::identity(2), &OracleBudget::default()).unwrap();
        assert_eq!(r.value, q(2, 1));
        assert_eq!(r.selection, SubmatrixSelection::full(2, 2));
    }

    #[test]
    fn all_ones_and_negation() {
        let b = OracleBudget::default();
        assert_eq!(cut_norm_exact(&DenseMatrix::ones(3, 3), &b).unwrap().value, q(9, 1));
        let r = cut_norm_exact(&DenseMatrix::ones(2, 2).negated(), &b).unwrap();
        assert_eq!(r.value, q(4, 1));
        assert_eq!(r.sum, q(-4, 1));
    }

    #[test]
    fn discrepancy_examples() {
        let b = OracleBudget::default();
        assert_eq!(disc_exact(&DenseMatrix::ones(3, 4), &b).unwrap().value, q(0, 1));
        let r = disc_exact(&DenseMatrix::identity(2), &b).unwrap();
        assert_eq!(r.value, q(1, 2));
        let m = DenseMatrix::from_i64(2, 3, &[1, -2, 0, 3, 1, 1]).unwrap();
        let shifted = m.shifted(&BigRational::from_integer(7.into()));
        assert_eq!(disc_exact(&m, &b).unwrap().value, disc_exact(&shifted, &b).unwrap().value);
    }

    #[test]
    fn witness_sum_matches_value() {
        let m = DenseMatrix::from_i64(3, 5, &[1, -2, 0, 3, 1, 1, 4, -4, 0, 2, -1, -1, 2, 2, -3])
            .unwrap();
        let r = cut_norm_exact(&m, &OracleBudget::default()).unwrap();
        assert_eq!(rect_sum(&m, &r.selection), r.sum);
        assert_eq!(r.sum.abs(), r.value);
    }

    #[test]
    fn zero_matrix_has_cell_witness() {
        let r = cut_norm_exact(&DenseMatrix::zeros(2, 2), &OracleBudget::default()).unwrap();
        assert!(r.value.is_zero());
        assert_eq!(r.selection.area(), 1);
    }

    #[test]
    fn budget_enforced() {
        let r = cut_norm_exact(&DenseMatrix::zeros(13, 2), &OracleBudget::default());
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }
}
