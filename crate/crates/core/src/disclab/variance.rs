use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    exact_rank, is_separated, mean_exact, rational_to_f64, variance_exact,
    DenseMatrix,
};
use crate::oracles::{find_constant_rectangle, OracleBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceFloorMode {
    /// Separated with mean at most 0.9: `q ≥ p/100`.
    SeparatedLowMean,
    /// Separated: `q ≥ p(1−p)/100`.
    Separated,
    /// Integer without a half-sized constant submatrix: `q ≥ 1/(128r)`.
    IntegerNoHalfConstant,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceFloor {
    pub mode: VarianceFloorMode,
    pub variance: f64,
    pub floor: f64,
    /// Decided exactly.
    pub holds: bool,
}

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn variance_floor(
    m: &DenseMatrix,
    mode: VarianceFloorMode,
    budget: &OracleBudget,
) -> Result<VarianceFloor> {
    let p = mean_exact(m);
    let q = variance_exact(m);
    let floor = match mode {
        VarianceFloorMode::SeparatedLowMean => {
            if !is_separated(m) {
                return Err(Error::PreconditionFailed("matrix is not separated".into()));
            }
            if p > ratio(9, 10) {
                return Err(Error::PreconditionFailed(format!(
                    "mean {} exceeds 0.9",
                    rational_to_f64(&p)
                )));
            }
            &p / ratio(100, 1)
        }
        VarianceFloorMode::Separated => {
            if !is_separated(m) {
                return Err(Error::PreconditionFailed("matrix is not separated".into()));
            }
            &p * (BigRational::one() - &p) / ratio(100, 1)
        }
        VarianceFloorMode::IntegerNoHalfConstant => {
            if !m.is_integer() {
                return Err(Error::PreconditionFailed("matrix has non-integer entries".into()));
            }
            let (h, w) = (m.rows().div_ceil(2), m.cols().div_ceil(2));
            if find_constant_rectangle(m, h, w, None, budget)?.is_some() {
                return Err(Error::PreconditionFailed(
                    "matrix has a half-sized constant submatrix".into(),
                ));
            }
            let r = exact_rank(m);
            ratio(1, 128 * r.max(1) as i64)
        }
    };
    Ok(VarianceFloor {
        mode,
        variance: rational_to_f64(&q),
        floor: rational_to_f64(&floor),
        holds: q >= floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_density_zero_one() {
        let m = DenseMatrix::from_i64(2, 2, &[1, 0, 0, 1]).unwrap();
        let v = variance_floor(&m, VarianceFloorMode::SeparatedLowMean, &OracleBudget::default()).unwrap();
        assert_eq!(v.floor, 0.005);
        assert_eq!(v.variance, 0.25);
        assert!(v.holds);
    }

    #[test]
    fn separated_high_mean() {
        let m = DenseMatrix::from_i64(2, 2, &[0, 1, 1, 1]).unwrap();
        let v = variance_floor(&m, VarianceFloorMode::Separated, &OracleBudget::default()).unwrap();
        assert_eq!(v.variance, 3.0 / 16.0);
        assert_eq!(v.floor, 3.0 / 1600.0);
        let lo = variance_floor(&m, VarianceFloorMode::SeparatedLowMean, &OracleBudget::default()).unwrap();
        assert_eq!(lo.floor, 3.0 / 400.0);
        assert!(lo.holds);
        let dense = DenseMatrix::ones(3, 3);
        assert!(matches!(
            variance_floor(&dense, VarianceFloorMode::SeparatedLowMean, &OracleBudget::default()),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn constant_rejected_in_integer_mode() {
        let m = DenseMatrix::filled(4, 4, 5.0);
        assert!(matches!(
            variance_floor(&m, VarianceFloorMode::IntegerNoHalfConstant, &OracleBudget::default()),
            Err(Error::PreconditionFailed(_))
        ));
        let i3 = DenseMatrix::identity(3);
        // Every 2×2 block of I₃ mixes values.
        let v = variance_floor(&i3, VarianceFloorMode::IntegerNoHalfConstant, &OracleBudget::default()).unwrap();
        assert_eq!(v.floor, 1.0 / 384.0);
        assert!(v.holds);
    }
}
