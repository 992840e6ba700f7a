use faer::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::selection::SubmatrixSelection;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryMode {
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
enum Data {
    Rational(Vec<BigRational>),
    Float(Vec<f64>),
}

/// Row-major dense matrix with at least one row and one column.
///
/// Rational mode keeps every entry exact; float mode stores finite `f64`s.
/// The mode is fixed at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Data,
}

/// Exact rational value of a finite float.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn check_shape(rows: usize, cols: usize, len: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParams("matrix needs at least one row and column".into()));
    }
    if rows * cols != len {
        return Err(Error::InvalidParams(format!(
            "{} entries do not fill a {rows}x{cols} matrix",
            len
        )));
    }
    Ok(())
}

impl DenseMatrix {
    pub fn from_f64(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("matrix entries must be finite".into()));
        }
        Ok(DenseMatrix {
            rows,
            cols,
            data: Data::Float(data),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParams("ragged rows".into()));
        }
        Self::from_f64(m, n, rows.concat())
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        Self::from_f64(rows, cols, data.iter().map(|&x| x as f64).collect())
    }

    pub fn from_rational(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        Ok(DenseMatrix {
            rows,
            cols,
            data: Data::Rational(data),
        })
    }

    pub fn from_i64_rational(rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        Self::from_rational(
            rows,
            cols,
            data.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    /// All-ones matrix `J`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 1.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self::from_f64(rows, cols, vec![value; rows * cols]).expect("valid shape")
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_f64(n, n, data).expect("valid shape")
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_f64(rows, cols, data).expect("valid shape and finite entries")
    }

    #[inline]
    pub fn mode(&self) -> EntryMode {
        match self.data {
            Data::Rational(_) => EntryMode::Rational,
            Data::Float(_) => EntryMode::Float,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.data {
            Data::Float(v) => v[i * self.cols + j],
            Data::Rational(v) => rational_to_f64(&v[i * self.cols + j]),
        }
    }

    pub fn get_exact(&self, i: usize, j: usize) -> BigRational {
        match &self.data {
            Data::Float(v) => f64_to_rational(v[i * self.cols + j]),
            Data::Rational(v) => v[i * self.cols + j].clone(),
        }
    }

    pub fn float_data(&self) -> Option<&[f64]> {
        match &self.data {
            Data::Float(v) => Some(v),
            Data::Rational(_) => None,
        }
    }

    pub fn rational_data(&self) -> Option<&[BigRational]> {
        match &self.data {
            Data::Rational(v) => Some(v),
            Data::Float(_) => None,
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.data {
            Data::Float(v) => v.clone(),
            Data::Rational(v) => v.iter().map(rational_to_f64).collect(),
        }
    }

    pub fn to_rational_vec(&self) -> Vec<BigRational> {
        match &self.data {
            Data::Float(v) => v.iter().map(|&x| f64_to_rational(x)).collect(),
            Data::Rational(v) => v.clone(),
        }
    }

    pub fn to_float(&self) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: Data::Float(self.to_f64_vec()),
        }
    }

    pub fn to_rational(&self) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: Data::Rational(self.to_rational_vec()),
        }
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Entries as integers, if every entry is an integer fitting in `i64`.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        match &self.data {
            Data::Float(v) => v
                .iter()
                .map(|&x| {
                    (x.fract() == 0.0 && x.abs() < 9.0e15).then_some(x as i64)
                })
                .collect(),
            Data::Rational(v) => v
                .iter()
                .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
                .collect(),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.to_i64_vec().is_some()
    }

    /// Entries scaled by a common positive denominator, all integral.
    pub fn to_scaled_integers(&self) -> (Vec<BigInt>, BigInt) {
        let vals = self.to_rational_vec();
        let mut den = BigInt::from(1);
        for v in &vals {
            den = num_integer::Integer::lcm(&den, v.denom());
        }
        let ints = vals
            .iter()
            .map(|v| v.numer() * (&den / v.denom()))
            .collect();
        (ints, den)
    }

    pub fn submatrix(&self, sel: &SubmatrixSelection) -> Result<DenseMatrix> {
        sel.check_bounds(self.rows, self.cols)?;
        if sel.is_empty() {
            return Err(Error::InvalidParams("empty selection has no submatrix".into()));
        }
        let (r, c) = (&sel.rows, &sel.cols);
        let data = match &self.data {
            Data::Float(v) => Data::Float(
                r.iter()
                    .flat_map(|&i| c.iter().map(move |&j| v[i * self.cols + j]))
                    .collect(),
            ),
            Data::Rational(v) => Data::Rational(
                r.iter()
                    .flat_map(|&i| c.iter().map(move |&j| v[i * self.cols + j].clone()))
                    .collect(),
            ),
        };
        Ok(DenseMatrix {
            rows: r.len(),
            cols: c.len(),
            data,
        })
    }

    pub fn transpose(&self) -> DenseMatrix {
        let (m, n) = (self.rows, self.cols);
        let data = match &self.data {
            Data::Float(v) => {
                Data::Float((0..n * m).map(|k| v[(k % m) * n + k / m]).collect())
            }
            Data::Rational(v) => Data::Rational(
                (0..n * m).map(|k| v[(k % m) * n + k / m].clone()).collect(),
            ),
        };
        DenseMatrix {
            rows: n,
            cols: m,
            data,
        }
    }

    /// `M + c·J`, keeping the mode. Float mode adds `c` rounded to `f64`.
    pub fn shifted(&self, c: &BigRational) -> DenseMatrix {
        let data = match &self.data {
            Data::Float(v) => {
                let cf = rational_to_f64(c);
                Data::Float(v.iter().map(|x| x + cf).collect())
            }
            Data::Rational(v) => Data::Rational(v.iter().map(|x| x + c).collect()),
        };
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn negated(&self) -> DenseMatrix {
        let data = match &self.data {
            Data::Float(v) => Data::Float(v.iter().map(|x| -x).collect()),
            Data::Rational(v) => Data::Rational(v.iter().map(|x| -x).collect()),
        };
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> DenseMatrix {
        // entry (i, j) moves to (row_perm[i], col_perm[j])
        let mut inv_r = vec![0; self.rows];
        let mut inv_c = vec![0; self.cols];
        for (i, &p) in row_perm.iter().enumerate() {
            inv_r[p] = i;
        }
        for (j, &p) in col_perm.iter().enumerate() {
            inv_c[p] = j;
        }
        let sel = SubmatrixSelection {
            rows: inv_r,
            cols: inv_c,
        };
        let (r, c) = (&sel.rows, &sel.cols);
        let data = match &self.data {
            Data::Float(v) => Data::Float(
                r.iter()
                    .flat_map(|&i| c.iter().map(move |&j| v[i * self.cols + j]))
                    .collect(),
            ),
            Data::Rational(v) => Data::Rational(
                r.iter()
                    .flat_map(|&i| c.iter().map(move |&j| v[i * self.cols + j].clone()))
                    .collect(),
            ),
        };
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn to_faer(&self) -> Mat<f64> {
        let v = self.to_f64_vec();
        Mat::from_fn(self.rows, self.cols, |i, j| v[i * self.cols + j])
    }

    pub fn count_nonzero(&self) -> usize {
        match &self.data {
            Data::Float(v) => v.iter().filter(|x| **x != 0.0).count(),
            Data::Rational(v) => v.iter().filter(|x| !x.is_zero()).count(),
        }
    }

    pub fn is_zero_at(&self, i: usize, j: usize) -> bool {
        match &self.data {
            Data::Float(v) => v[i * self.cols + j] == 0.0,
            Data::Rational(v) => v[i * self.cols + j].is_zero(),
        }
    }

    /// True when the selected entries all equal the entry at its first cell.
    pub fn is_constant_on(&self, sel: &SubmatrixSelection) -> bool {
        let (Some(&i0), Some(&j0)) = (sel.rows.first(), sel.cols.first()) else {
            return true;
        };
        match &self.data {
            Data::Float(v) => {
                let x = v[i0 * self.cols + j0];
                sel.rows
                    .iter()
                    .all(|&i| sel.cols.iter().all(|&j| v[i * self.cols + j] == x))
            }
            Data::Rational(v) => {
                let x = &v[i0 * self.cols + j0];
                sel.rows
                    .iter()
                    .all(|&i| sel.cols.iter().all(|&j| &v[i * self.cols + j] == x))
            }
        }
    }

    pub fn is_zero_on(&self, sel: &SubmatrixSelection) -> bool {
        sel.rows
            .iter()
            .all(|&i| sel.cols.iter().all(|&j| self.is_zero_at(i, j)))
    }
}
