use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::matrix::DenseMatrix;

/// Exact rank over the rationals by fraction-free (Bareiss) elimination.
///
/// Runs in `i128` with checked arithmetic and restarts in `BigInt` on overflow.
pub fn exact_rank(m: &DenseMatrix) -> usize {
    let (ints, _) = m.to_scaled_integers();
    let small: Option<Vec<i128>> = ints.iter().map(|x| x.to_i128()).collect();
    if let Some(a) = small {
        if let Some(r) = bareiss_i128(a, m.rows(), m.cols()) {
            return r;
        }
    }
    bareiss_big(ints, m.rows(), m.cols())
}

fn bareiss_i128(mut a: Vec<i128>, rows: usize, cols: usize) -> Option<usize> {
    let mut rank = 0;
    let mut prev: i128 = 1;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let piv = a[rank * cols + c];
        for i in rank + 1..rows {
            let f = a[i * cols + c];
            for j in c + 1..cols {
                let x = a[i * cols + j]
                    .checked_mul(piv)?
                    .checked_sub(f.checked_mul(a[rank * cols + j])?)?;
                a[i * cols + j] = x / prev;
            }
            a[i * cols + c] = 0;
        }
        prev = piv;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_big(mut a: Vec<BigInt>, rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let piv = a[rank * cols + c].clone();
        for i in rank + 1..rows {
            let f = a[i * cols + c].clone();
            for j in c + 1..cols {
                let x = &a[i * cols + j] * &piv - &f * &a[rank * cols + j];
                a[i * cols + j] = x / &prev;
            }
            a[i * cols + c] = BigInt::zero();
        }
        prev = piv;
        rank += 1;
    }
    rank
}
