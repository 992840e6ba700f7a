use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::constants::ConstantSet;
use super::halves::{
    alternate_half, argmin_combination, binomial, extreme_half, for_each_combination, half_shape, halve_reduce_average, HalfMode,
    Scaled,
};
use super::witness::disc_lower_witness;
use crate::error::{Error, Result};
use crate::matcore::{
    exact_rank, f64_to_rational, is_separated, mean, mean_exact, numerical_rank, rational_to_f64, variance, variance_exact,
    DenseMatrix, SubmatrixSelection, DEFAULT_RANK_TOL,
};
use crate::oracles::{find_constant_rectangle, OracleBudget};

/// How the required mean drop scales with the mean `p` and rank `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `c·√(p/r)`; separated input with `p ∈ (0, 0.9)`.
    SqrtPOverR,
    /// `c·√(p(1−p)/r)`; separated input with `p ∈ (0, 1)`.
    PTimesOneMinusP,
    /// `c/r`; integer input without a quarter-sized constant submatrix.
    OneOverR,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepConfig {
    pub constants: ConstantSet,
    pub rule: StepRule,
    /// Rank used in the step size; computed when absent.
    pub rank: Option<usize>,
    pub mode: HalfMode,
    pub budget: OracleBudget,
    pub seed: u64,
}

impl StepConfig {
    pub fn new(constants: ConstantSet, rule: StepRule) -> Self {
        StepConfig {
            constants,
            rule,
            rank: None,
            mode: HalfMode::Auto,
            budget: OracleBudget::branch_and_bound(),
            seed: 0,
        }
    }

    pub fn step_size(&self, p: f64, r: usize) -> f64 {
        let r = r.max(1) as f64;
        let k = &self.constants;
        match self.rule {
            StepRule::SqrtPOverR => k.c * (p / r).sqrt(),
            StepRule::PTimesOneMinusP => k.c * (p * (1.0 - p) / r).sqrt(),
            StepRule::OneOverR => k.c_variant / r,
        }
    }

    pub fn alpha(&self) -> f64 {
        match self.rule {
            StepRule::SqrtPOverR => self.constants.alpha,
            _ => self.constants.alpha_variant,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepCase {
    /// `p' ≤ p − step` and `q' ≤ 4q`.
    DensityDrop,
    /// `p' ≤ p + 12·step` and `q' ≤ α·q`.
    VarianceDrop,
    /// Heuristic search certified neither; the lowest-mean half found is returned.
    Uncertified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepOutcome {
    pub selection: SubmatrixSelection,
    /// `p − p'`, formed exactly before rounding.
    pub mean_drop: f64,
    pub case: StepCase,
    pub mean: f64,
    pub variance: f64,
    pub new_mean: f64,
    pub new_variance: f64,
    pub step: f64,
    pub rank: usize,
    pub exhaustive: bool,
    /// False when the quarter-constant precondition was too large to check.
    pub precondition_checked: bool,
}

impl StepOutcome {
    /// Re-derives the certificate from the stored numbers.
    pub fn certificate_holds(&self, alpha: f64) -> bool {
        match self.case {
            StepCase::DensityDrop => {
                self.mean_drop >= self.step
                    && self.new_variance <= 4.0 * self.variance * (1.0 + 1e-12)
            }
            StepCase::VarianceDrop => {
                -self.mean_drop <= 12.0 * self.step
                    && self.new_variance <= alpha * self.variance * (1.0 + 1e-12)
            }
            StepCase::Uncertified => false,
        }
    }
}

pub(crate) fn rank_of(m: &DenseMatrix) -> Result<usize> {
    if m.is_integer() && m.len() <= 64 * 64 {
        Ok(exact_rank(m))
    } else {
        numerical_rank(m, DEFAULT_RANK_TOL)
    }
}

fn check_preconditions(m: &DenseMatrix, cfg: &StepConfig, p: f64) -> Result<bool> {
    if m.rows() < 2 || m.cols() < 2 {
        return Err(Error::PreconditionFailed("step needs at least a 2x2 matrix".into()));
    }
    match cfg.rule {
        StepRule::SqrtPOverR | StepRule::PTimesOneMinusP => {
            if !is_separated(m) {
                return Err(Error::PreconditionFailed("matrix is not separated".into()));
            }
            let hi = if cfg.rule == StepRule::SqrtPOverR { 0.9 } else { 1.0 };
            if !(p > 0.0 && p < hi) {
                return Err(Error::PreconditionFailed(format!("mean {p} outside (0, {hi})")));
            }
            Ok(true)
        }
        StepRule::OneOverR => {
            if !m.is_integer() {
                return Err(Error::PreconditionFailed("matrix has non-integer entries".into()));
            }
            let (h, w) = (m.rows().div_ceil(4), m.cols().div_ceil(4));
            match find_constant_rectangle(m, h, w, None, &cfg.budget) {
                Ok(Some(_)) => Err(Error::PreconditionFailed(
                    "matrix has a quarter-sized constant submatrix".into(),
                )),
                Ok(None) => Ok(true),
                Err(Error::BudgetExceeded { .. }) => Ok(false),
                Err(e) => Err(e),
            }
        }
    }
}

/// Finds a half-sized submatrix certifying one of the two outcomes.
///
/// Within the enumeration budget the search is exact, and failing both
/// outcomes is reported as `ConstantsFalsified`. Beyond it, witness-guided
/// heuristics are tried and an `Uncertified` outcome may be returned.
pub fn two_cases_step(m: &DenseMatrix, cfg: &StepConfig) -> Result<StepOutcome> {
    cfg.constants.validate()?;
    let p = mean(m);
    let precondition_checked = check_preconditions(m, cfg, p)?;
    let q_exact = variance_exact(m);
    let q = q_exact.to_f64().unwrap_or(f64::NAN);
    let r = match cfg.rank {
        Some(r) => r,
        None => rank_of(m)?,
    };
    let step = cfg.step_size(p, r);
    let alpha = cfg.alpha();
    let (h, w) = half_shape(m.rows(), m.cols());
    let pairs = binomial(m.rows() as u128, h as u128).saturating_mul(binomial(m.cols() as u128, w as u128));
    let exhaustive = match cfg.mode {
        HalfMode::Exhaustive => {
            cfg.budget.check_enumeration("exact two-case search", pairs)?;
            true
        }
        HalfMode::Heuristic => false,
        HalfMode::Auto => pairs <= cfg.budget.max_enumeration as u128,
    };

    // Mean differences are formed exactly so that tiny proof-scale steps are
    // not absorbed by rounding.
    let p_exact = mean_exact(m);
    let outcome = |sel: SubmatrixSelection, case: StepCase| -> Result<StepOutcome> {
        let sub = m.submatrix(&sel)?;
        Ok(StepOutcome {
            mean_drop: rational_to_f64(&(&p_exact - mean_exact(&sub))),
            new_mean: mean(&sub),
            new_variance: variance(&sub),
            selection: sel,
            case,
            mean: p,
            variance: q,
            step,
            rank: r,
            exhaustive,
            precondition_checked,
        })
    };
    let four_q = BigRational::from_integer(4.into()) * &q_exact;
    let alpha_q = f64_to_rational(alpha) * &q_exact;
    let density_ok = |sel: &SubmatrixSelection| -> Result<bool> {
        let sub = m.submatrix(sel)?;
        let drop = rational_to_f64(&(&p_exact - mean_exact(&sub)));
        Ok(drop >= step && variance_exact(&sub) <= four_q)
    };
    let variance_ok = |sel: &SubmatrixSelection| -> Result<bool> {
        let sub = m.submatrix(sel)?;
        let rise = rational_to_f64(&(mean_exact(&sub) - &p_exact));
        Ok(rise <= 12.0 * step && variance_exact(&sub) <= alpha_q)
    };
    if exhaustive {
        let s = Scaled::new(m)?;
        let low = extreme_half(&s, false);
        if density_ok(&low)? {
            return outcome(low, StepCase::DensityDrop);
        }
        if let Some(sel) = min_variance_half(&s, p + 12.0 * step) {
            if variance_ok(&sel)? {
                return outcome(sel, StepCase::VarianceDrop);
            }
        }
        return Err(Error::ConstantsFalsified(format!(
            "no half of a {}x{} matrix (p = {p}, q = {q}, r = {r}) meets either outcome with step {step:e} and alpha {alpha:e}",
            m.rows(),
            m.cols()
        )));
    }

    let low = halve_reduce_average(m, None, HalfMode::Heuristic, &cfg.budget, cfg.seed)?.selection;
    if density_ok(&low)? {
        return outcome(low, StepCase::DensityDrop);
    }
    let mut candidates = Vec::new();
    if let Ok(dw) = disc_lower_witness(m, &cfg.constants) {
        candidates.push(dw.selection);
    }
    let data = m.to_f64_vec();
    let mut targets = vec![0.0, p.round(), p.floor(), p.ceil()];
    targets.dedup();
    for t in targets {
        let (rs, cs, _) = alternate_half(&data, m.rows(), m.cols(), (0..m.cols()).collect(), |x| {
            (x - t) * (x - t)
        });
        candidates.push(SubmatrixSelection::new(rs, cs));
    }
    for sel in candidates {
        if variance_ok(&sel)? {
            return outcome(sel, StepCase::VarianceDrop);
        }
    }
    outcome(low, StepCase::Uncertified)
}

/// Exact minimum-variance half among those with mean at most `cap`.
fn min_variance_half(s: &Scaled, cap: f64) -> Option<SubmatrixSelection> {
    let (h, w) = half_shape(s.rows, s.cols);
    let n = (h * w) as i128;
    let den = s.den.to_f64().unwrap_or(1.0);
    let scale = n as f64 * den;
    let limit = cap * scale + 1e-9 * (1.0 + cap.abs() * scale);
    let (_, rows) = argmin_combination(s.rows, h, |rs| best_columns(s, rs, w, limit))?;
    let (_, cols) = best_columns(s, &rows, w, limit)?;
    Some(SubmatrixSelection::new(rows, cols))
}

/// For fixed rows, the column half minimizing `N·Σx² − (Σx)²` with `Σx ≤ limit`.
fn best_columns(s: &Scaled, rows: &[usize], w: usize, limit: f64) -> Option<(i128, Vec<usize>)> {
    let n = (rows.len() * w) as i128;
    let sum: Vec<i128> = (0..s.cols).map(|j| rows.iter().map(|&i| s.at(i, j)).sum()).collect();
    let sq: Vec<i128> = (0..s.cols)
        .map(|j| rows.iter().map(|&i| s.at(i, j) * s.at(i, j)).sum())
        .collect();
    let mut best: Option<(i128, Vec<usize>)> = None;
    for_each_combination(s.cols, w, |cs| {
        let tot: i128 = cs.iter().map(|&j| sum[j]).sum();
        if tot as f64 > limit {
            return;
        }
        let key = n * cs.iter().map(|&j| sq[j]).sum::<i128>() - tot * tot;
        if best.as_ref().is_none_or(|b| key < b.0) {
            best = Some((key, cs.to_vec()));
        }
    });
    best
}
