use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::matrix::{rational_to_f64, DenseMatrix, EntryMode};

/// Average entry.
pub fn mean(m: &DenseMatrix) -> f64 {
    match m.float_data() {
        Some(v) => kahan_sum(v.iter().copied()) / m.len() as f64,
        None => rational_to_f64(&mean_exact(m)),
    }
}

pub fn mean_exact(m: &DenseMatrix) -> BigRational {
    let (ints, den) = m.to_scaled_integers();
    let sum: BigInt = ints.iter().sum();
    BigRational::new(sum, den * BigInt::from(m.len()))
}

/// Mean squared deviation from the average entry; zero iff `m` is constant.
pub fn variance(m: &DenseMatrix) -> f64 {
    match m.float_data() {
        Some(v) => {
            if let Some(ints) = m.to_i64_vec() {
                return variance_of_integers(&ints);
            }
            let p = mean(m);
            kahan_sum(v.iter().map(|x| (x - p) * (x - p))) / m.len() as f64
        }
        None => rational_to_f64(&variance_exact(m)),
    }
}

fn variance_of_integers(v: &[i64]) -> f64 {
    // (N·Σx² − (Σx)²) / N², exact in i128 for desk-scale inputs
    let n = v.len() as i128;
    let s: i128 = v.iter().map(|&x| x as i128).sum();
    let s2: i128 = v.iter().map(|&x| (x as i128) * (x as i128)).sum();
    let num = n * s2 - s * s;
    num as f64 / (n as f64 * n as f64)
}

pub fn variance_exact(m: &DenseMatrix) -> BigRational {
    let (ints, den) = m.to_scaled_integers();
    let n = BigInt::from(ints.len());
    let s: BigInt = ints.iter().sum();
    let s2: BigInt = ints.iter().map(|x| x * x).sum();
    let num = &n * s2 - &s * &s;
    BigRational::new(num, &n * &n * &den * &den)
}

/// Squared Frobenius norm.
pub fn frobenius_sq(m: &DenseMatrix) -> f64 {
    match m.float_data() {
        Some(v) => kahan_sum(v.iter().map(|x| x * x)),
        None => rational_to_f64(&frobenius_sq_exact(m)),
    }
}

pub fn frobenius_sq_exact(m: &DenseMatrix) -> BigRational {
    m.to_rational_vec().iter().map(|x| x * x).sum()
}

/// No entry lies strictly between 0 and 1.
pub fn is_separated(m: &DenseMatrix) -> bool {
    match m.float_data() {
        Some(v) => v.iter().all(|&x| x <= 0.0 || x >= 1.0),
        None => {
            let one = BigRational::from_integer(1.into());
            m.to_rational_vec()
                .iter()
                .all(|x| !x.is_positive() || *x >= one)
        }
    }
}

/// `M − mean(M)·J`. Rational inputs and integer-valued float inputs are
/// centered exactly, so the result is invariant under adding multiples of `J`.
pub fn centered(m: &DenseMatrix) -> DenseMatrix {
    match m.mode() {
        EntryMode::Rational => m.shifted(&-mean_exact(m)),
        EntryMode::Float => {
            if let Some(ints) = m.to_i64_vec() {
                let n = ints.len() as i128;
                let s: i128 = ints.iter().map(|&x| x as i128).sum();
                let data = ints
                    .iter()
                    .map(|&x| (n * x as i128 - s) as f64 / n as f64)
                    .collect();
                return DenseMatrix::from_f64(m.rows(), m.cols(), data).expect("same shape");
            }
            let p = mean(m);
            let data = m.to_f64_vec().iter().map(|x| x - p).collect();
            DenseMatrix::from_f64(m.rows(), m.cols(), data).expect("same shape")
        }
    }
}

/// Squared Frobenius distance to `t·J`.
pub fn distance_to_constant_sq(m: &DenseMatrix, t: f64) -> f64 {
    kahan_sum(m.to_f64_vec().iter().map(|x| (x - t) * (x - t)))
}

pub(crate) fn kahan_sum<I: Iterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in it {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
