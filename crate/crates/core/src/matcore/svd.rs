use faer::Mat;

use super::matrix::DenseMatrix;
use super::stats::frobenius_sq;
use crate::error::{Error, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Thin SVD truncated to the singular values above `tol·σ₁`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `m × r`, orthonormal columns.
    pub u: Mat<f64>,
    /// Descending, all strictly above `tol·σ₁`.
    pub singular_values: Vec<f64>,
    /// `n × r`, orthonormal columns.
    pub v: Mat<f64>,
    pub tol: f64,
    /// `‖M − UΣVᵀ‖_F` measured after truncation.
    pub reconstruction_error: f64,
    pub frobenius_norm: f64,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// Sum of the retained singular values.
    pub fn nuclear_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }
}

pub fn svd(m: &DenseMatrix, tol: f64) -> Result<SvdResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams("svd tolerance must be positive".into()));
    }
    let a = m.to_faer();
    let fro = frobenius_sq(m).sqrt();
    let dec = a.thin_svd().map_err(|e| {
        Error::NumericalFailure(format!(
            "SVD did not converge on a {}x{} matrix with Frobenius norm {fro:e}: {e:?}",
            m.rows(),
            m.cols()
        ))
    })?;
    let (u_full, v_full) = (dec.U(), dec.V());
    let k = m.rows().min(m.cols());
    let sv: Vec<f64> = (0..k).map(|i| dec.S()[i]).collect();
    if sv.iter().any(|s| !s.is_finite()) {
        return Err(Error::NumericalFailure("non-finite singular value".into()));
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));
    let top = order.first().map_or(0.0, |&i| sv[i]);
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| top > 0.0 && sv[i] > tol * top)
        .collect();

    let r = kept.len();
    let u = Mat::from_fn(m.rows(), r, |i, c| u_full[(i, kept[c])]);
    let v = Mat::from_fn(m.cols(), r, |j, c| v_full[(j, kept[c])]);
    let singular_values: Vec<f64> = kept.iter().map(|&i| sv[i]).collect();

    let mut err = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let mut x = a[(i, j)];
            for c in 0..r {
                x -= singular_values[c] * u[(i, c)] * v[(j, c)];
            }
            err += x * x;
        }
    }

    Ok(SvdResult {
        u,
        singular_values,
        v,
        tol,
        reconstruction_error: err.sqrt(),
        frobenius_norm: fro,
    })
}

/// Number of singular values above `tol·σ₁`.
pub fn numerical_rank(m: &DenseMatrix, tol: f64) -> Result<usize> {
    Ok(svd(m, tol)?.rank())
}
