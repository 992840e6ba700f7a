use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::generators::{gen_c1, gen_c2, gen_c3, gen_c4, gen_pbiased, ConstructionSpec, PBiased};
use crate::error::{Error, Result};
use crate::famcore::disjoint_pairs;
use crate::matcore::{exact_rank, format_rational, mean_exact, numerical_rank, DenseMatrix, SubmatrixSelection, DEFAULT_RANK_TOL};
use crate::oracles::{covering_probability_exact, max_constant_rectangle, max_constant_square, OracleBudget};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "reason")]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// The check did not fit its budget.
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    pub claimed: String,
    pub measured: String,
    #[serde(flatten)]
    pub status: ClaimStatus,
}

impl Claim {
    fn compare<T: std::fmt::Display + PartialEq>(name: &str, claimed: T, measured: T) -> Claim {
        let status = if claimed == measured {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        };
        Claim {
            name: name.into(),
            claimed: claimed.to_string(),
            measured: measured.to_string(),
            status,
        }
    }

    fn at_most<T: std::fmt::Display + PartialOrd>(name: &str, cap: T, measured: T) -> Claim {
        let status = if measured <= cap {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        };
        Claim {
            name: name.into(),
            claimed: format!("<= {cap}"),
            measured: measured.to_string(),
            status,
        }
    }

    fn at_least<T: std::fmt::Display + PartialOrd>(name: &str, floor: T, measured: T) -> Claim {
        let status = if measured >= floor {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        };
        Claim {
            name: name.into(),
            claimed: format!(">= {floor}"),
            measured: measured.to_string(),
            status,
        }
    }

    fn from_result(name: &str, claimed: String, r: Result<Claim>) -> Claim {
        match r {
            Ok(c) => c,
            Err(e @ Error::BudgetExceeded { .. }) => Claim {
                name: name.into(),
                claimed,
                measured: String::new(),
                status: ClaimStatus::Skipped(e.to_string()),
            },
            Err(e) => Claim {
                name: name.into(),
                claimed,
                measured: e.to_string(),
                status: ClaimStatus::Fail,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub construction: ConstructionSpec,
    pub claims: Vec<Claim>,
    /// No claim failed. Skipped claims do not count against this.
    pub passed: bool,
}

impl VerificationReport {
    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }
}

type Check<'a> = Box<dyn Fn() -> Claim + Send + Sync + 'a>;

fn rational(p: u128, q: u128) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Exact rank for matrices small enough for Bareiss elimination, numerical otherwise.
fn rank(m: &DenseMatrix) -> Result<usize> {
    if m.rows() <= 128 && m.cols() <= 128 {
        Ok(exact_rank(m))
    } else {
        numerical_rank(m, DEFAULT_RANK_TOL)
    }
}

/// Largest all-zero square of the `k`-subset intersection matrix: zero blocks
/// pair subsets of `U` with subsets of a disjoint `V`, so the side is
/// `max_u min(C(u, k), C(r − u, k))`.
pub fn c2_structural_max(r: usize, k: usize) -> u128 {
    (0..=r)
        .map(|u| binomial(u as u128, k as u128).min(binomial((r - u) as u128, k as u128)))
        .max()
        .unwrap_or(0)
}

/// The zero square realizing [`c2_structural_max`], in the colex indexing.
fn c2_structural_block(fam_masks: &[u64], r: usize) -> SubmatrixSelection {
    // min(C(u,k), C(r−u,k)) peaks at u = ⌊r/2⌋
    let u = r / 2;
    let low = (1u64 << u) - 1;
    let rows: Vec<usize> = (0..fam_masks.len()).filter(|&i| fam_masks[i] & !low == 0).collect();
    let cols: Vec<usize> = (0..fam_masks.len()).filter(|&i| fam_masks[i] & low == 0).collect();
    SubmatrixSelection::new(rows, cols).square()
}

/// Budget that lets the exact checks run on every construction up to 128 distinct rows.
pub fn default_verify_budget() -> OracleBudget {
    OracleBudget::with_dims(128, 128)
}

/// Measures every claimed property of a construction. Checks run in
/// parallel; each one that exceeds `budget` is reported as skipped.
pub fn verify_construction(spec: &ConstructionSpec, budget: &OracleBudget) -> Result<VerificationReport> {
    spec.validate()?;
    let claims = match *spec {
        ConstructionSpec::C1 { n, d } => verify_c1(n, d, budget)?,
        ConstructionSpec::C2 { r, k } => verify_c2(r, k, budget)?,
        ConstructionSpec::C3 { r } => verify_c3(r, budget)?,
        ConstructionSpec::C4 { r, k } => verify_c4(r, k, budget)?,
        ConstructionSpec::PBiased { n, ref p, r } => verify_pbiased(n, p, r, budget)?,
    };
    let passed = claims.iter().all(|c| c.status != ClaimStatus::Fail);
    Ok(VerificationReport {
        construction: spec.clone(),
        claims,
        passed,
    })
}

fn run(checks: Vec<Check<'_>>) -> Vec<Claim> {
    checks.par_iter().map(|c| c()).collect()
}

fn verify_c1(n: usize, d: usize, budget: &OracleBudget) -> Result<Vec<Claim>> {
    let (a, b) = gen_c1(n, d)?;
    let half = n / 2;
    let s: u128 = (0..=d).map(|i| binomial(half as u128, i as u128)).sum();
    let size = s << half;
    let union = 2 * size - s * s;
    let checks: Vec<Check> = vec![
        Box::new(|| Claim::compare("size_a", size, a.len() as u128)),
        Box::new(|| Claim::compare("size_b", size, b.len() as u128)),
        Box::new(|| {
            let mut all: Vec<u64> = a.iter().chain(b.iter()).map(|x| x.mask()).collect();
            all.sort_unstable();
            all.dedup();
            Claim::compare("size_union", union, all.len() as u128)
        }),
        Box::new(|| {
            let pairs = a.len() as u128 * b.len() as u128;
            let claimed = format!(">= {}", rational(pairs, 1 << (2 * d)));
            let r = budget
                .check_enumeration("disjoint pair count", pairs)
                .and_then(|_| disjoint_pairs(&a, &b))
                .map(|pc| Claim::at_least("disjoint_pairs", rational(pairs, 1 << (2 * d)), rational(pc.count, 1)));
            Claim::from_result("disjoint_pairs", claimed, r)
        }),
    ];
    Ok(run(checks))
}

fn verify_c2(r: usize, k: usize, budget: &OracleBudget) -> Result<Vec<Claim>> {
    let (fam, m) = gen_c2(r, k)?;
    let n = fam.len();
    let masks: Vec<u64> = fam.iter().map(|s| s.mask()).collect();
    let zeros_per_row = binomial((r - k) as u128, k as u128);
    let structural = c2_structural_max(r, k);
    let checks: Vec<Check> = vec![
        Box::new(|| Claim::compare("size", binomial(r as u128, k as u128), n as u128)),
        Box::new(|| Claim::compare("average", rational((k * k) as u128, r as u128), mean_exact(&m))),
        Box::new(|| {
            let counts: Vec<u128> = (0..n)
                .map(|i| (0..n).filter(|&j| m.is_zero_at(i, j)).count() as u128)
                .collect();
            let measured = if counts.iter().all(|&c| c == counts[0]) {
                counts[0].to_string()
            } else {
                format!("{counts:?}")
            };
            Claim::compare("zeros_per_row", zeros_per_row.to_string(), measured)
        }),
        Box::new(|| {
            let cells = (n * n) as u128;
            let claimed = BigRational::one() - rational(zeros_per_row, n as u128);
            Claim::compare("nonzero_fraction", claimed, rational(m.count_nonzero() as u128, cells))
        }),
        Box::new(|| Claim::from_result("rank", format!("<= {r}"), rank(&m).map(|x| Claim::at_most("rank", r, x)))),
        Box::new(|| {
            let block = c2_structural_block(&masks, r);
            let ok = m.is_zero_on(&block);
            let measured = if ok { block.side() as u128 } else { 0 };
            Claim::compare("structural_max_square", structural, measured)
        }),
        Box::new(|| {
            let r = max_constant_square(&m, Some(&BigRational::zero()), budget)
                .map(|b| Claim::compare("oracle_max_zero_square", structural, b.map_or(0, |b| b.size) as u128));
            Claim::from_result("oracle_max_zero_square", structural.to_string(), r)
        }),
    ];
    Ok(run(checks))
}

fn verify_c3(r: usize, budget: &OracleBudget) -> Result<Vec<Claim>> {
    let m = gen_c3(r)?;
    let cells = 1u128 << r;
    let zeros = binomial(r as u128, (r / 4) as u128) * 3u128.pow((3 * r / 4) as u32);
    let checks: Vec<Check> = vec![
        Box::new(|| Claim::compare("size", cells, m.rows() as u128)),
        Box::new(|| Claim::compare("zero_count", zeros, (m.len() - m.count_nonzero()) as u128)),
        Box::new(|| {
            Claim::from_result("rank", format!("<= {}", r + 1), rank(&m).map(|x| Claim::at_most("rank", r + 1, x)))
        }),
        Box::new(|| {
            let res = max_constant_rectangle(&m, Some(&BigRational::zero()), budget)
                .map(|b| Claim::at_most("max_zero_rectangle_area", cells, b.map_or(0, |b| b.size) as u128));
            Claim::from_result("max_zero_rectangle_area", format!("<= {cells}"), res)
        }),
    ];
    Ok(run(checks))
}

fn verify_c4(r: usize, k: usize, budget: &OracleBudget) -> Result<Vec<Claim>> {
    let m = gen_c4(r, k)?;
    let n = m.rows();
    // Largest integer s with s² ≤ (2k+1)^r.
    let cap = (n as f64).sqrt().floor() as usize;
    let cap = (cap.saturating_sub(1)..=cap + 1).filter(|s| s * s <= n).max().unwrap_or(0);
    let range = (k * k * r) as f64;
    let checks: Vec<Check> = vec![
        Box::new(|| Claim::compare("size", (2 * k + 1).pow(r as u32), n)),
        Box::new(|| Claim::compare("symmetric", true, m.transpose() == m)),
        Box::new(|| Claim::from_result("rank", format!("<= {r}"), rank(&m).map(|x| Claim::at_most("rank", r, x)))),
        Box::new(|| {
            let worst = m.to_f64_vec().iter().fold(0.0f64, |a, x| a.max(x.abs()));
            Claim::at_most("entry_magnitude", range, worst)
        }),
        Box::new(|| {
            let res = max_constant_square(&m, None, budget)
                .map(|b| Claim::at_most("max_constant_square", cap, b.map_or(0, |b| b.size)));
            Claim::from_result("max_constant_square", format!("<= {cap}"), res)
        }),
    ];
    Ok(run(checks))
}

fn verify_pbiased(n: usize, p: &BigRational, r: usize, budget: &OracleBudget) -> Result<Vec<Claim>> {
    let PBiased::Explicit(mu) = gen_pbiased(n, p)? else {
        return Ok(vec![Claim {
            name: "explicit_support".into(),
            claimed: format!("n <= {}", crate::distribution::MAX_EXPLICIT_UNIVERSE),
            measured: n.to_string(),
            status: ClaimStatus::Skipped("support too large to enumerate".into()),
        }]);
    };
    let one = BigRational::one();
    let miss = p * num_traits::pow(&one - p, r);
    let formula = num_traits::pow(&one - miss, n);
    let checks: Vec<Check> = vec![
        Box::new(|| {
            let total: BigRational = mu.atoms().iter().map(|(_, w)| w).sum();
            Claim::compare("total_mass", format_rational(&one), format_rational(&total))
        }),
        Box::new(|| {
            let res = covering_probability_exact(&mu, r, budget).map(|x| {
                Claim::compare("covering_probability", format_rational(&formula), format_rational(&x))
            });
            Claim::from_result("covering_probability", format_rational(&formula), res)
        }),
    ];
    Ok(run(checks))
}
