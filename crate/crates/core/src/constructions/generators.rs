use num_integer::binomial;
use num_rational::BigRational;
use serde::Serialize;

use crate::distribution::{Distribution, SetSampler, MAX_EXPLICIT_UNIVERSE};
use crate::error::{Error, Result};
use crate::famcore::{BitSet, SetFamily};
use crate::matcore::DenseMatrix;

/// Largest side of a generated matrix or family.
pub const MAX_GENERATED_SIDE: usize = 1 << 12;

fn check_side(what: &'static str, side: u128) -> Result<usize> {
    if side > MAX_GENERATED_SIDE as u128 {
        return Err(Error::BudgetExceeded {
            what,
            needed: side,
            limit: MAX_GENERATED_SIDE as u128,
        });
    }
    Ok(side as usize)
}

/// Which construction to build, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "id")]
pub enum ConstructionSpec {
    /// Sets with at most `d` elements in the lower (resp. upper) half of `[n]`.
    C1 { n: usize, d: usize },
    /// Intersection matrix of all `k`-subsets of `[r]`.
    C2 { r: usize, k: usize },
    /// Intersection matrix of all subsets of `[r]`, shifted by `r/4`.
    C3 { r: usize },
    /// Gram matrix of the grid `{−k, …, k}^r`.
    C4 { r: usize, k: usize },
    /// Product measure on `2^[n]`; `r` is the covering depth that gets checked.
    #[serde(rename = "p-biased")]
    PBiased {
        n: usize,
        #[serde(serialize_with = "crate::serde_util::rational")]
        p: BigRational,
        r: usize,
    },
}

impl ConstructionSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParams(s));
        match *self {
            ConstructionSpec::C1 { n, d } => {
                if n % 2 == 1 || n > 2 * 30 {
                    return bad(format!("n = {n} must be even and at most 60"));
                }
                if d > n / 2 {
                    return bad(format!("d = {d} exceeds n/2"));
                }
            }
            ConstructionSpec::C2 { r, k } => {
                if k == 0 || k > r || r > 63 {
                    return bad(format!("need 1 <= k <= r <= 63, got r = {r}, k = {k}"));
                }
            }
            ConstructionSpec::C3 { r } => {
                if r == 0 || r % 4 != 0 {
                    return bad(format!("r = {r} must be a positive multiple of 4"));
                }
            }
            ConstructionSpec::C4 { r, .. } => {
                if r == 0 {
                    return bad("r must be positive".into());
                }
            }
            ConstructionSpec::PBiased { ref p, .. } => {
                if *p < BigRational::from_integer(0.into()) || *p > BigRational::from_integer(1.into()) {
                    return bad(format!("p = {p} is outside [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

/// Both families of the first construction, each in mask order.
pub fn gen_c1(n: usize, d: usize) -> Result<(SetFamily, SetFamily)> {
    ConstructionSpec::C1 { n, d }.validate()?;
    let half = n / 2;
    let low_count: u128 = (0..=d).map(|i| binomial(half as u128, i as u128)).sum();
    check_side("first construction family", low_count << half)?;
    let low_mask = (1u64 << half) - 1;
    let pick = |keep: &dyn Fn(u64) -> bool| {
        let sets = (0..1u64 << n)
            .filter(|&m| keep(m))
            .map(|m| BitSet::from_mask(n, m))
            .collect();
        SetFamily::from_sets(n, sets)
    };
    let a = pick(&|m| (m & low_mask).count_ones() as usize <= d)?;
    let b = pick(&|m| (m >> half).count_ones() as usize <= d)?;
    Ok((a, b))
}

/// Masks of `k`-subsets of `[r]` in increasing order, which is colex order.
fn colex_masks(r: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut m: u64 = (1 << k) - 1;
    while m < 1 << r {
        out.push(m);
        // next mask with the same popcount
        let c = m & m.wrapping_neg();
        let rr = m + c;
        m = (((rr ^ m) >> 2) / c) | rr;
    }
    out
}

fn intersection_matrix(masks: &[u64], shift: i64) -> Result<DenseMatrix> {
    let n = masks.len();
    let data: Vec<i64> = masks
        .iter()
        .flat_map(|&a| masks.iter().map(move |&b| (a & b).count_ones() as i64 - shift))
        .collect();
    DenseMatrix::from_i64(n, n, &data)
}

/// `k`-subsets of `[r]` in colex order and their intersection matrix.
pub fn gen_c2(r: usize, k: usize) -> Result<(SetFamily, DenseMatrix)> {
    ConstructionSpec::C2 { r, k }.validate()?;
    check_side("second construction matrix", binomial(r as u128, k as u128))?;
    let masks = colex_masks(r, k);
    let fam = SetFamily::from_sets(r, masks.iter().map(|&m| BitSet::from_mask(r, m)).collect())?;
    Ok((fam, intersection_matrix(&masks, 0)?))
}

/// `|A ∩ B| − r/4` over all subsets of `[r]` in colex (mask) order.
pub fn gen_c3(r: usize) -> Result<DenseMatrix> {
    ConstructionSpec::C3 { r }.validate()?;
    check_side("third construction matrix", 1u128 << r.min(127))?;
    let masks: Vec<u64> = (0..1u64 << r).collect();
    intersection_matrix(&masks, (r / 4) as i64)
}

/// Grid vectors of `{−k, …, k}^r` in odometer order: the last coordinate
/// turns fastest, starting from `(−k, …, −k)`.
pub fn grid_vectors(r: usize, k: usize) -> Result<Vec<Vec<i64>>> {
    let base = 2 * k as u128 + 1;
    let n = check_side("grid", base.checked_pow(r as u32).unwrap_or(u128::MAX))?;
    let mut v = vec![-(k as i64); r];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(v.clone());
        for c in (0..r).rev() {
            if v[c] < k as i64 {
                v[c] += 1;
                break;
            }
            v[c] = -(k as i64);
        }
    }
    Ok(out)
}

/// Gram matrix of the grid vectors.
pub fn gen_c4(r: usize, k: usize) -> Result<DenseMatrix> {
    ConstructionSpec::C4 { r, k }.validate()?;
    let vs = grid_vectors(r, k)?;
    let n = vs.len();
    let data: Vec<i64> = vs
        .iter()
        .flat_map(|a| vs.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>()))
        .collect();
    DenseMatrix::from_i64(n, n, &data)
}

/// Product measure, explicit when the support is small enough.
#[derive(Clone, Debug)]
pub enum PBiased {
    Explicit(Distribution),
    Sampler(SetSampler),
}

pub fn gen_pbiased(n: usize, p: &BigRational) -> Result<PBiased> {
    if n <= MAX_EXPLICIT_UNIVERSE {
        Distribution::product(n, p).map(PBiased::Explicit)
    } else {
        let pf = crate::matcore::rational_to_f64(p);
        SetSampler::product(n, pf).map(PBiased::Sampler)
    }
}
