//! Half-sized submatrices: `⌈m/2⌉ × ⌈n/2⌉` throughout.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::witness::rounded_negative_rectangle;
use crate::error::{Error, Result};
use crate::matcore::{centered, mean_exact, rational_to_f64, DenseMatrix, SubmatrixSelection};
use crate::oracles::{disc_exact, OracleBudget};

pub fn half_shape(rows: usize, cols: usize) -> (usize, usize) {
    (rows.div_ceil(2), cols.div_ceil(2))
}

/// Integer matrix `den · M`, used by the exact enumerations.
pub(crate) struct Scaled {
    pub rows: usize,
    pub cols: usize,
    pub vals: Vec<i128>,
    pub den: BigInt,
}

impl Scaled {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        let (ints, den) = m.to_scaled_integers();
        let limit = BigInt::from(1u64 << 50);
        let vals = ints
            .iter()
            .map(|x| {
                if x.magnitude() > limit.magnitude() {
                    None
                } else {
                    x.to_i128()
                }
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NumericalFailure("entries too large for exact enumeration".into()))?;
        Ok(Scaled {
            rows: m.rows(),
            cols: m.cols(),
            vals,
            den,
        })
    }

    pub fn at(&self, i: usize, j: usize) -> i128 {
        self.vals[i * self.cols + j]
    }

    pub fn transpose(&self) -> Scaled {
        let mut vals = Vec::with_capacity(self.vals.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                vals.push(self.at(i, j));
            }
        }
        Scaled {
            rows: self.cols,
            cols: self.rows,
            vals,
            den: self.den.clone(),
        }
    }

    /// Exact mean of the block.
    pub fn block_mean(&self, rows: &[usize], cols: &[usize]) -> BigRational {
        let s: i128 = rows.iter().map(|&i| cols.iter().map(|&j| self.at(i, j)).sum::<i128>()).sum();
        BigRational::new(
            BigInt::from(s),
            &self.den * BigInt::from(rows.len() * cols.len()),
        )
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let mut i = k;
        while i > 0 && c[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        c[i - 1] += 1;
        for t in i..k {
            c[t] = c[t - 1] + 1;
        }
    }
}

/// Lexicographically first `k`-subset minimizing `key`, computed in parallel
/// over the smallest element. `None` keys are skipped.
pub(crate) fn argmin_combination<K, F>(n: usize, k: usize, key: F) -> Option<(K, Vec<usize>)>
where
    K: Ord + Send,
    F: Fn(&[usize]) -> Option<K> + Sync,
{
    if k == 0 || k > n {
        return None;
    }
    (0..=n - k)
        .into_par_iter()
        .filter_map(|first| {
            let mut best: Option<(K, Vec<usize>)> = None;
            let mut buf = vec![first; k];
            for_each_combination(n - first - 1, k - 1, |rest| {
                for (t, &x) in rest.iter().enumerate() {
                    buf[t + 1] = x + first + 1;
                }
                if let Some(v) = key(&buf) {
                    if best.as_ref().is_none_or(|b| v < b.0) {
                        best = Some((v, buf.clone()));
                    }
                }
            });
            best
        })
        .reduce_with(|l, r| if r.0 < l.0 { r } else { l })
}

/// Best `k` columns for the given rows: smallest (or largest) sums, ties by index.
fn extreme_columns(s: &Scaled, rows: &[usize], k: usize, largest: bool) -> (i128, Vec<usize>) {
    let sums: Vec<i128> = (0..s.cols)
        .map(|j| rows.iter().map(|&i| s.at(i, j)).sum())
        .collect();
    let mut idx: Vec<usize> = (0..s.cols).collect();
    idx.sort_by(|&a, &b| {
        let o = sums[a].cmp(&sums[b]);
        (if largest { o.reverse() } else { o }).then(a.cmp(&b))
    });
    let mut chosen = idx[..k].to_vec();
    chosen.sort_unstable();
    (chosen.iter().map(|&j| sums[j]).sum(), chosen)
}

/// `C(n, k)`, saturating at `u128::MAX`; only compared against budgets.
pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) stays integral because c = C(n, i).
        match c.checked_mul(n - i) {
            Some(x) => c = x / (i + 1),
            None => return u128::MAX,
        }
    }
    c
}

/// Number of row subsets visited by the exact extreme-half search.
pub fn half_enumeration_size(rows: usize, cols: usize) -> u128 {
    let (h, w) = half_shape(rows, cols);
    let a = binomial(rows as u128, h as u128);
    let b = binomial(cols as u128, w as u128);
    a.min(b)
}

/// Exact half with the smallest (or largest) mean.
pub(crate) fn extreme_half(s: &Scaled, largest: bool) -> SubmatrixSelection {
    let (h, w) = half_shape(s.rows, s.cols);
    let flip = binomial(s.cols as u128, w as u128) < binomial(s.rows as u128, h as u128);
    let t;
    let (work, k_rows, k_cols) = if flip {
        t = s.transpose();
        (&t, w, h)
    } else {
        (s, h, w)
    };
    let (_, rows) = argmin_combination(work.rows, k_rows, |rs| {
        let (sum, _) = extreme_columns(work, rs, k_cols, largest);
        Some(if largest { -sum } else { sum })
    })
    .expect("nonempty matrix");
    let (_, cols) = extreme_columns(work, &rows, k_cols, largest);
    if flip {
        SubmatrixSelection::new(cols, rows)
    } else {
        SubmatrixSelection::new(rows, cols)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfMode {
    Exhaustive,
    Heuristic,
    /// Exhaustive when the enumeration fits the budget.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfReduction {
    pub selection: SubmatrixSelection,
    pub mean_before: f64,
    pub mean_after: f64,
    pub exhaustive: bool,
    /// `disc(M)/(3mn)` when the exact discrepancy fits the budget.
    pub guaranteed_drop: Option<f64>,
    /// Whether `mean_before − mean_after ≥ disc(M)/(3mn)`, decided exactly.
    pub meets_guarantee: Option<bool>,
}

/// Half-sized submatrix with a small mean.
///
/// Exact mode returns the minimum-mean half. Heuristic mode pads or trims a
/// negative-deviation rectangle (the given one, or a rounded SVD witness) to
/// half size, then alternates best responses on rows and columns.
pub fn halve_reduce_average(
    m: &DenseMatrix,
    witness: Option<&SubmatrixSelection>,
    mode: HalfMode,
    budget: &OracleBudget,
    seed: u64,
) -> Result<HalfReduction> {
    if m.rows() < 2 || m.cols() < 2 {
        return Err(Error::PreconditionFailed(format!(
            "halving needs at least 2 rows and 2 columns, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let count = half_enumeration_size(m.rows(), m.cols());
    let exhaustive = match mode {
        HalfMode::Exhaustive => {
            budget.check_enumeration("exact half search", count)?;
            true
        }
        HalfMode::Heuristic => false,
        HalfMode::Auto => count <= budget.max_enumeration as u128,
    };
    let p = mean_exact(m);
    let selection = if exhaustive {
        extreme_half(&Scaled::new(m)?, false)
    } else {
        heuristic_low_half(m, witness, seed)?
    };
    let after = mean_exact(&m.submatrix(&selection)?);

    let (mut guaranteed_drop, mut meets_guarantee) = (None, None);
    if budget.check_dims("discrepancy", m.rows(), m.cols()).is_ok() {
        let disc = disc_exact(m, budget)?.value;
        let mn = BigRational::from_integer(BigInt::from(3 * m.rows() * m.cols()));
        guaranteed_drop = Some(rational_to_f64(&(&disc / &mn)));
        meets_guarantee = Some((&p - &after) * mn >= disc);
    }
    Ok(HalfReduction {
        selection,
        mean_before: rational_to_f64(&p),
        mean_after: rational_to_f64(&after),
        exhaustive,
        guaranteed_drop,
        meets_guarantee,
    })
}

fn smallest(vals: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let mut out = idx[..k].to_vec();
    out.sort_unstable();
    out
}

/// Rows (then columns) nearest the target block, by smallest `score` sums.
pub(crate) fn alternate_half(
    data: &[f64],
    rows: usize,
    cols: usize,
    mut cur_cols: Vec<usize>,
    score: impl Fn(f64) -> f64,
) -> (Vec<usize>, Vec<usize>, f64) {
    let (h, w) = half_shape(rows, cols);
    let mut cur_rows: Vec<usize> = Vec::new();
    let mut total = f64::INFINITY;
    for _ in 0..64 {
        let rs: Vec<f64> = (0..rows)
            .map(|i| cur_cols.iter().map(|&j| score(data[i * cols + j])).sum::<f64>() / cur_cols.len() as f64)
            .collect();
        let nr = smallest(&rs, h);
        let cs: Vec<f64> = (0..cols)
            .map(|j| nr.iter().map(|&i| score(data[i * cols + j])).sum::<f64>())
            .collect();
        let nc = smallest(&cs, w);
        let t: f64 = nc.iter().map(|&j| cs[j]).sum();
        let stable = nr == cur_rows && nc == cur_cols;
        cur_rows = nr;
        cur_cols = nc;
        total = t;
        if stable {
            break;
        }
    }
    (cur_rows, cur_cols, total)
}

fn heuristic_low_half(
    m: &DenseMatrix,
    witness: Option<&SubmatrixSelection>,
    seed: u64,
) -> Result<SubmatrixSelection> {
    let (rows, cols) = (m.rows(), m.cols());
    let data = m.to_f64_vec();
    let mut starts: Vec<Vec<usize>> = vec![(0..cols).collect()];
    match witness {
        Some(w) if !w.cols.is_empty() => starts.push(w.cols.clone()),
        _ => {
            if let Some((sel, _)) = rounded_negative_rectangle(&centered(m), 256, seed)? {
                starts.push(sel.cols);
            }
        }
    }
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    for s in starts {
        let (r, c, v) = alternate_half(&data, rows, cols, s, |x| x);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, r, c));
        }
    }
    let (_, r, c) = best.expect("at least one start");
    Ok(SubmatrixSelection::new(r, c))
}

/// Largest `|p(M') − p(M)|` over all halves against `4·disc(M)/mn`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfDeviation {
    pub max_deviation: f64,
    pub selection: SubmatrixSelection,
    pub disc: f64,
    pub bound: f64,
    /// Decided in exact arithmetic.
    pub holds: bool,
}

pub fn half_average_deviation_check(m: &DenseMatrix, budget: &OracleBudget) -> Result<HalfDeviation> {
    budget.check_enumeration("half deviation check", half_enumeration_size(m.rows(), m.cols()))?;
    let disc = disc_exact(m, budget)?.value;
    let s = Scaled::new(m)?;
    let p = mean_exact(m);
    let lo = extreme_half(&s, false);
    let hi = extreme_half(&s, true);
    let dlo = &p - s.block_mean(&lo.rows, &lo.cols);
    let dhi = s.block_mean(&hi.rows, &hi.cols) - &p;
    let (dev, selection) = if dhi > dlo { (dhi, hi) } else { (dlo, lo) };
    let mn = BigRational::from_integer(BigInt::from(m.rows() * m.cols()));
    let bound = BigRational::from_integer(4.into()) * &disc / mn;
    debug_assert!(!(dev < BigRational::zero()));
    Ok(HalfDeviation {
        max_deviation: rational_to_f64(&dev),
        selection,
        disc: rational_to_f64(&disc),
        bound: rational_to_f64(&bound),
        holds: dev <= bound,
    })
}
