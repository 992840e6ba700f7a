use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::famcore::SetFamily;

/// Working precision of the grid scan, in bits.
pub const SCAN_PRECISION: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

/// `H(p) = −p log₂ p − (1−p) log₂(1−p)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// `1 − (1−p)^k + C/2^k − H(p)`, in double precision.
pub fn entropy_gap(p: f64, k: u32, c: f64) -> Result<f64> {
    let h = binary_entropy(p)?;
    Ok(1.0 - (1.0 - p).powi(k as i32) + c / 2f64.powi(k as i32) - h)
}

fn bf(x: u64) -> BigFloat {
    BigFloat::from_u64(x, SCAN_PRECISION)
}

fn bf_to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    x.format(Radix::Dec, RM, cc)
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .unwrap_or(f64::NAN)
}

fn bf_entropy(p: &BigFloat, q: &BigFloat, cc: &mut Consts) -> BigFloat {
    let term = |x: &BigFloat, cc: &mut Consts| {
        if x.is_zero() {
            bf(0)
        } else {
            x.mul(&x.log2(SCAN_PRECISION, RM, cc), SCAN_PRECISION, RM)
        }
    };
    let s = term(p, cc).add(&term(q, cc), SCAN_PRECISION, RM);
    s.neg()
}

/// Minimum of the entropy gap over `p = i/steps`, `1 ≤ k ≤ k_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyScan {
    pub steps: u64,
    pub k_max: u32,
    /// Natural logarithm of the constant `C`.
    pub ln_c: f64,
    pub precision_bits: usize,
    pub points: u64,
    pub min_gap: f64,
    /// Minimum gap rendered at full working precision.
    pub min_gap_decimal: String,
    pub argmin_p: f64,
    pub argmin_k: u32,
    pub negative_points: u64,
}

impl EntropyScan {
    pub fn holds(&self) -> bool {
        self.negative_points == 0
    }
}

struct Local {
    gap: BigFloat,
    i: u64,
    k: u32,
    negative: u64,
}

/// Exhaustive scan in extended precision. Workers split the `p` axis and the
/// merge keeps the smallest gap, ties going to the smallest `(i, k)`.
pub fn entropy_grid_scan(steps: u64, k_max: u32, ln_c: f64) -> Result<EntropyScan> {
    if steps == 0 || k_max == 0 || !ln_c.is_finite() {
        return Err(Error::InvalidParams(format!(
            "entropy scan needs steps ≥ 1, k_max ≥ 1 and finite ln C (got {steps}, {k_max}, {ln_c})"
        )));
    }
    let consts = || Consts::new().map_err(|e| Error::NumericalFailure(format!("{e:?}")));
    let mut cc = consts()?;
    let c = BigFloat::from_f64(ln_c, SCAN_PRECISION).exp(SCAN_PRECISION, RM, &mut cc);
    let half = BigFloat::from_f64(0.5, SCAN_PRECISION);
    let den = bf(steps);

    let chunk = 64u64;
    let chunks: Vec<u64> = (0..=steps / chunk).collect();
    let locals: Vec<Local> = chunks
        .par_iter()
        .map(|&ci| {
            let mut cc = Consts::new().expect("constant cache");
            let mut best: Option<Local> = None;
            let mut negative = 0;
            for i in ci * chunk..((ci + 1) * chunk).min(steps + 1) {
                let p = bf(i).div(&den, SCAN_PRECISION, RM);
                let q = bf(steps - i).div(&den, SCAN_PRECISION, RM);
                let h = bf_entropy(&p, &q, &mut cc);
                let mut qk = bf(1);
                let mut ck = c.clone();
                for k in 1..=k_max {
                    qk = qk.mul(&q, SCAN_PRECISION, RM);
                    ck = ck.mul(&half, SCAN_PRECISION, RM);
                    let gap = bf(1)
                        .sub(&qk, SCAN_PRECISION, RM)
                        .add(&ck, SCAN_PRECISION, RM)
                        .sub(&h, SCAN_PRECISION, RM);
                    if gap.is_negative() {
                        negative += 1;
                    }
                    let better = match &best {
                        None => true,
                        Some(b) => gap.cmp(&b.gap).is_some_and(|o| o < 0),
                    };
                    if better {
                        best = Some(Local { gap, i, k, negative: 0 });
                    }
                }
            }
            let mut b = best.expect("nonempty chunk");
            b.negative = negative;
            b
        })
        .collect();

    let negative_points = locals.iter().map(|l| l.negative).sum();
    // Chunks are in ascending `i`, so a strict comparison keeps the earliest tie.
    let mut best = &locals[0];
    for l in &locals[1..] {
        if l.gap.cmp(&best.gap).is_some_and(|o| o < 0) {
            best = l;
        }
    }
    let min_gap_decimal = best
        .gap
        .format(Radix::Dec, RM, &mut cc)
        .map_err(|e| Error::NumericalFailure(format!("{e:?}")))?;
    Ok(EntropyScan {
        steps,
        k_max,
        ln_c,
        precision_bits: SCAN_PRECISION,
        points: (steps + 1) * k_max as u64,
        min_gap: bf_to_f64(&best.gap, &mut cc),
        min_gap_decimal,
        argmin_p: best.i as f64 / steps as f64,
        argmin_k: best.k,
        negative_points,
    })
}

/// Per-coordinate membership counts of a family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordinateMarginals {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl CoordinateMarginals {
    pub fn of(f: &SetFamily) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut counts = vec![0u64; f.universe()];
        for s in f {
            for i in s.iter() {
                counts[i] += 1;
            }
        }
        Ok(CoordinateMarginals {
            counts,
            total: f.len() as u64,
        })
    }

    pub fn probability(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.counts[i]), BigInt::from(self.total))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// `Σ H(pᵢ)`.
    pub fn entropy_sum(&self) -> f64 {
        self.probabilities()
            .into_iter()
            .map(|p| binary_entropy(p).expect("frequency lies in [0,1]"))
            .sum()
    }
}

/// `E|F₁ ∪ … ∪ F_k|` for independent uniform draws, as `Σ 1 − (1−pᵢ)^k`.
pub fn expected_union_exact(f: &SetFamily, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidParams("union of zero sets".into()));
    }
    let m = CoordinateMarginals::of(f)?;
    let one = BigRational::one();
    let mut total = BigRational::zero();
    for i in 0..m.counts.len() {
        let q = &one - m.probability(i);
        total += &one - num_traits::pow(q, k as usize);
    }
    Ok(total)
}

/// `(Σ H(pᵢ), log₂|F|)` over the distinct members of `f`; the first is never smaller.
pub fn subadditivity_bound(f: &SetFamily) -> Result<(f64, f64)> {
    let d = f.dedup();
    let m = CoordinateMarginals::of(&d)?;
    Ok((m.entropy_sum(), (d.len() as f64).log2()))
}

/// Both sides of `E|∪| ≥ Σ H(pᵢ) − C·n/2^k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnionEntropyCheck {
    pub expected_union: f64,
    pub entropy_sum: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn union_entropy_check(f: &SetFamily, k: u32, c: f64) -> Result<UnionEntropyCheck> {
    let d = f.dedup();
    let expected_union = expected_union_exact(&d, k)?
        .to_f64()
        .ok_or_else(|| Error::NumericalFailure("expected union".into()))?;
    let entropy_sum = CoordinateMarginals::of(&d)?.entropy_sum();
    let slack = c * d.universe() as f64 / 2f64.powi(k as i32);
    // Entropies carry rounding; allow a few ulps per coordinate.
    let tol = 1e-12 * (1.0 + d.universe() as f64);
    Ok(UnionEntropyCheck {
        expected_union,
        entropy_sum,
        slack,
        holds: expected_union + tol >= entropy_sum - slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // 2 − (3/4)·log₂3
        assert_relative_eq!(binary_entropy(0.25).unwrap(), 0.811_278_124_459_132_9, epsilon = 1e-15);
        assert!(matches!(binary_entropy(1.5), Err(Error::InvalidProbability(_))));
        assert!(matches!(binary_entropy(-0.1), Err(Error::InvalidProbability(_))));
    }

    #[test]
    fn gap_examples() {
        let c = 40f64.exp();
        assert_relative_eq!(entropy_gap(0.5, 1, c).unwrap(), 0.5 + c / 2.0 - 1.0);
        assert_relative_eq!(entropy_gap(0.0, 7, c).unwrap(), c / 128.0);
    }

    #[test]
    fn small_scan_matches_double_precision() {
        let s = entropy_grid_scan(100, 10, 40.0).unwrap();
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..=100u64 {
            for k in 1..=10 {
                let g = entropy_gap(i as f64 / 100.0, k, 40f64.exp()).unwrap();
                if g < best.0 {
                    best = (g, i, k);
                }
            }
        }
        assert_relative_eq!(s.min_gap, best.0, max_relative = 1e-9);
        assert_eq!(s.argmin_k, best.2);
        assert!(s.holds());
        assert_eq!(s.points, 1010);
    }

    #[test]
    fn scan_detects_small_constant() {
        // With C = 1 the gap is negative near p = 1/2 for large k.
        let s = entropy_grid_scan(100, 20, 0.0).unwrap();
        assert!(!s.holds());
        assert!(s.min_gap < 0.0);
    }

    #[test]
    fn expected_union_examples() {
        let f = SetFamily::power_set(2);
        assert_eq!(expected_union_exact(&f, 1).unwrap(), BigRational::one());
        assert_eq!(
            expected_union_exact(&f, 2).unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        let full = SetFamily::from_one_based(5, &[vec![1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(expected_union_exact(&full, 9).unwrap(), BigRational::from_integer(5.into()));
        assert_eq!(expected_union_exact(&SetFamily::new(3), 1), Err(Error::EmptyFamily));
    }

    #[test]
    fn subadditivity_examples() {
        let (h, l) = subadditivity_bound(&SetFamily::power_set(6)).unwrap();
        assert_relative_eq!(h, 6.0);
        assert_relative_eq!(l, 6.0);
        let f = SetFamily::from_one_based(3, &[vec![], vec![1]]).unwrap();
        assert_eq!(subadditivity_bound(&f).unwrap(), (1.0, 1.0));
    }
}
