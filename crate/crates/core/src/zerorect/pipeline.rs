use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::config::{
    progress_drop, progress_values, PipelineConfig, PipelineTrace, ProgressForm, Stage, Termination, TraceStep,
};
use super::canonical::Canonical;
use super::sparse::{regularize_bounded, sparse_zero_extract};
use crate::disclab::halves::{extreme_half, Scaled};
use crate::disclab::{rank_of, two_cases_step, StepCase, StepConfig, StepRule};
use crate::error::{Error, Result};
use crate::matcore::{is_separated, mean, mean_exact, variance, DenseMatrix, SubmatrixSelection};
use crate::oracles::{certify_constant, find_constant_rectangle, max_constant_square};

/// All-zero submatrix found by the zero pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroResult {
    pub selection: SubmatrixSelection,
    /// Side of the largest square inside the selection.
    pub side: usize,
    pub trace: PipelineTrace,
}

/// Constant submatrix found by the integer pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantResult {
    pub selection: SubmatrixSelection,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub value: BigRational,
    pub side: usize,
    pub trace: PipelineTrace,
}

/// Mutable state shared by both pipelines.
struct Run<'a> {
    m: &'a DenseMatrix,
    cfg: &'a PipelineConfig,
    sel: SubmatrixSelection,
    steps: Vec<TraceStep>,
    halving_steps: usize,
    uncertified: usize,
    falsified: usize,
}

impl<'a> Run<'a> {
    fn new(m: &'a DenseMatrix, cfg: &'a PipelineConfig) -> Self {
        Run {
            m,
            cfg,
            sel: SubmatrixSelection::full(m.rows(), m.cols()),
            steps: Vec::new(),
            halving_steps: 0,
            uncertified: 0,
            falsified: 0,
        }
    }

    fn current(&self) -> Result<DenseMatrix> {
        self.m.submatrix(&self.sel)
    }

    fn record(&mut self, stage: Stage, sub: &DenseMatrix, case: Option<StepCase>, level: Option<i64>) {
        self.steps.push(TraceStep {
            stage,
            rows: sub.rows(),
            cols: sub.cols(),
            mean: if sub.is_empty() { 0.0 } else { mean(sub) },
            variance: if sub.is_empty() { 0.0 } else { variance(sub) },
            case,
            progress: None,
            progress_drop: None,
            level,
        });
    }

    /// One halving step on `work` (the current submatrix, possibly shifted).
    /// Falsified constants fall back to the lowest-mean half outside audit mode.
    fn halve(
        &mut self,
        work: &DenseMatrix,
        rule: StepRule,
        form: ProgressForm,
        rank: usize,
        stage: Stage,
        level: Option<i64>,
    ) -> Result<()> {
        let cfg = self.cfg;
        let step_cfg = StepConfig {
            constants: cfg.constants,
            rule,
            rank: Some(rank),
            mode: cfg.half_mode,
            budget: cfg.step_budget,
            seed: cfg.seed.wrapping_add(self.halving_steps as u64),
        };
        let (inner, case, drop) = match two_cases_step(work, &step_cfg) {
            Ok(o) => {
                if o.case == StepCase::Uncertified {
                    self.uncertified += 1;
                    if cfg.audit() {
                        return Err(Error::ProgressViolation(format!(
                            "step {} on a {}x{} matrix certified neither outcome",
                            self.halving_steps,
                            work.rows(),
                            work.cols()
                        )));
                    }
                }
                let drop = progress_drop(form, o.mean, o.mean_drop, o.variance, o.new_variance, rank, &cfg.constants);
                (o.selection, o.case, drop)
            }
            Err(Error::ConstantsFalsified(_)) if !cfg.audit() => {
                self.falsified += 1;
                let low = extreme_half(&Scaled::new(work)?, false);
                let sub = work.submatrix(&low)?;
                let p = mean(work);
                let md = (mean_exact(work) - mean_exact(&sub)).to_f64().unwrap_or(f64::NAN);
                let drop = progress_drop(form, p, md, variance(work), variance(&sub), rank, &cfg.constants);
                (low, StepCase::Uncertified, drop)
            }
            Err(e) => return Err(e),
        };
        let quantum = form.quantum(&cfg.constants);
        if cfg.audit() && !(drop >= quantum) {
            return Err(Error::ProgressViolation(format!(
                "step {} lowered the potential by {drop:e}, below the quantum {quantum:e}",
                self.halving_steps
            )));
        }
        self.sel = self.sel.compose(&inner);
        self.halving_steps += 1;
        let sub = self.current()?;
        self.record(stage, &sub, Some(case), level);
        if let Some(last) = self.steps.last_mut() {
            last.progress_drop = Some(drop);
        }
        Ok(())
    }

    fn finish(self, termination: Termination, rank: usize, selection: SubmatrixSelection) -> PipelineTrace {
        PipelineTrace {
            steps: self.steps,
            termination,
            rank,
            halving_steps: self.halving_steps,
            uncertified_steps: self.uncertified,
            falsified_steps: self.falsified,
            final_selection: selection,
        }
    }
}

/// Adds rows, then columns, that keep every selected entry equal to `value`.
fn extend_constant(m: &DenseMatrix, sel: &SubmatrixSelection, value: &BigRational) -> SubmatrixSelection {
    let vf = value.to_f64().unwrap_or(f64::NAN);
    let eq = |i: usize, j: usize| match m.rational_data() {
        Some(v) => &v[i * m.cols() + j] == value,
        None => m.get(i, j) == vf,
    };
    let mut in_rows = vec![false; m.rows()];
    let mut in_cols = vec![false; m.cols()];
    sel.rows.iter().for_each(|&i| in_rows[i] = true);
    sel.cols.iter().for_each(|&j| in_cols[j] = true);
    let mut rows = sel.rows.clone();
    let mut cols = sel.cols.clone();
    if cols.is_empty() || rows.is_empty() {
        return sel.clone();
    }
    for i in 0..m.rows() {
        if !in_rows[i] && cols.iter().all(|&j| eq(i, j)) {
            rows.push(i);
        }
    }
    for j in 0..m.cols() {
        if !in_cols[j] && rows.iter().all(|&i| eq(i, j)) {
            cols.push(j);
        }
    }
    SubmatrixSelection::new(rows, cols)
}

/// Largest zero block among rows sharing the zero pattern of a single row.
fn greedy_zero_block(m: &DenseMatrix) -> Option<SubmatrixSelection> {
    (0..m.rows())
        .filter_map(|i| {
            let cols: Vec<usize> = (0..m.cols()).filter(|&j| m.is_zero_at(i, j)).collect();
            if cols.is_empty() {
                return None;
            }
            let rows: Vec<usize> = (0..m.rows())
                .filter(|&k| cols.iter().all(|&j| m.is_zero_at(k, j)))
                .collect();
            Some(SubmatrixSelection::new(rows, cols))
        })
        .max_by_key(|s| (s.side(), s.area()))
}

fn resolve_rank(m: &DenseMatrix, cfg: &PipelineConfig) -> Result<usize> {
    match cfg.rank {
        Some(r) => Ok(r),
        None => rank_of(m),
    }
}

/// Large all-zero submatrix of a non-negative separated matrix with mean at
/// most 1/2.
///
/// The matrix is first capped entrywise, then halved while the mean stays in
/// the working band, and the sparse remainder is cleared through an induced
/// matching. When the remainder is not sparse enough, an exact search (within
/// the oracle budget) or a greedy block takes over. Every result is checked
/// entry by entry.
///
/// Lines are first put in colour-refinement order, so permuting the input
/// permutes the output whenever the refinement separates every pair of
/// non-interchangeable lines.
pub fn find_zero_submatrix(m: &DenseMatrix, cfg: &PipelineConfig) -> Result<ZeroResult> {
    cfg.validate()?;
    let canon = Canonical::new(m);
    let mut res = zero_pipeline(&canon.matrix, cfg)?;
    res.selection = canon.restore(&res.selection);
    res.trace.final_selection = res.selection.clone();
    if !m.is_zero_on(&res.selection) {
        return Err(Error::VerificationFailed("zero pipeline produced a non-zero entry".into()));
    }
    Ok(res)
}

fn zero_pipeline(m: &DenseMatrix, cfg: &PipelineConfig) -> Result<ZeroResult> {
    if m.is_empty() {
        return Err(Error::InvalidParams("matrix is empty".into()));
    }
    if m.to_f64_vec().iter().any(|&x| x < 0.0) || !is_separated(m) {
        return Err(Error::PreconditionFailed(
            "entries must be zero or at least one".into(),
        ));
    }
    let p0 = mean(m);
    if p0 > 0.5 {
        return Err(Error::EmptyResult(format!("mean {p0} exceeds 1/2")));
    }
    let mut run = Run::new(m, cfg);
    run.record(Stage::Input, m, None, None);
    if m.count_nonzero() == 0 {
        let sel = SubmatrixSelection::full(m.rows(), m.cols());
        return Ok(ZeroResult {
            side: sel.side(),
            trace: run.finish(Termination::Trivial, 0, sel.clone()),
            selection: sel,
        });
    }
    let r = resolve_rank(m, cfg)?.max(1);
    let reg = regularize_bounded(m, r)?;
    run.sel = reg.selection;
    let sub = run.current()?;
    run.record(Stage::Regularize, &sub, None, None);

    let mut f0 = None;
    let termination = loop {
        let x = run.current()?;
        let (p, q) = (mean(&x), variance(&x));
        let f = progress_values(p, q, r, cfg).main;
        f0.get_or_insert(f);
        if let Some(last) = run.steps.last_mut() {
            last.progress = Some(f);
        }
        if p <= 1.0 / (cfg.low_stop * r as f64) {
            break Termination::LowMean;
        }
        if p >= cfg.high_stop {
            break Termination::HighMean;
        }
        if run.halving_steps >= cfg.max_steps {
            break Termination::StepLimit;
        }
        if x.rows() < 2 || x.cols() < 2 {
            break Termination::TooSmall;
        }
        run.halve(&x, StepRule::SqrtPOverR, ProgressForm::Main, r, Stage::Halving, None)?;
    };
    if cfg.audit() {
        if let Some(f0) = f0.filter(|f| f.is_finite() && *f > 0.0) {
            let allowed = 4.0 / cfg.constants.c * f0 + 2.0;
            if run.halving_steps as f64 > allowed {
                return Err(Error::ProgressViolation(format!(
                    "{} halving steps exceed the potential bound {allowed}",
                    run.halving_steps
                )));
            }
        }
    }

    let x = run.current()?;
    let (inner, termination) = match sparse_zero_extract(&x, r) {
        Ok(sp) => {
            run.record(Stage::Sparse, &x.submatrix(&sp.selection)?, None, None);
            (sp.selection, termination)
        }
        Err(Error::TooDense { .. }) | Err(Error::RankContradiction { .. }) => {
            let zero = BigRational::zero();
            match max_constant_square(&x, Some(&zero), &cfg.oracle_budget) {
                Ok(Some(block)) => (block.selection, Termination::OracleFallback),
                Ok(None) => return Err(Error::EmptyResult("no zero entry remains".into())),
                Err(Error::BudgetExceeded { .. }) => match greedy_zero_block(&x) {
                    Some(s) => (s, Termination::OracleFallback),
                    None => return Err(Error::EmptyResult("no zero entry remains".into())),
                },
                Err(e) => return Err(e),
            }
        }
        Err(e) => return Err(e),
    };
    let mut sel = run.sel.compose(&inner);
    if cfg.extend {
        sel = extend_constant(m, &sel, &BigRational::zero());
        run.record(Stage::Extension, &m.submatrix(&sel)?, None, None);
    }
    if sel.is_empty() || !m.is_zero_on(&sel) {
        return Err(Error::VerificationFailed("zero pipeline produced a non-zero entry".into()));
    }
    Ok(ZeroResult {
        side: sel.side(),
        trace: run.finish(termination, r, sel.clone()),
        selection: sel,
    })
}

/// Nearest integer, with halves rounding down.
fn nearest_level(p: f64) -> i64 {
    (p - 0.5).ceil() as i64
}

/// Zero submatrix of `x − level·J` when that matrix is sparse enough.
fn sparse_trigger(x: &DenseMatrix, level: i64, rank: usize) -> Result<Option<SubmatrixSelection>> {
    let shifted = x.shifted(&BigRational::from_integer((-level).into()));
    let nnz = shifted.count_nonzero();
    if nnz as f64 > x.len() as f64 / (16.0 * rank as f64) {
        return Ok(None);
    }
    match sparse_zero_extract(&shifted, rank) {
        Ok(sp) if !sp.selection.is_empty() => Ok(Some(sp.selection)),
        Ok(_) | Err(Error::RankContradiction { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Large constant submatrix of a non-negative integer matrix.
///
/// Each round picks the level nearest to the current mean. While the mean
/// sits strictly inside a level band the shifted matrix is halved with the
/// `p(1−p)` step; otherwise the integer `1/r` step lowers the mean towards
/// the next level. A quarter-sized constant block or a nearly constant
/// submatrix ends the descent early. For ranks below 16 the result is
/// compared with an exact search when that fits the oracle budget.
pub fn find_constant_submatrix_int(m: &DenseMatrix, cfg: &PipelineConfig) -> Result<ConstantResult> {
    cfg.validate()?;
    let canon = Canonical::new(m);
    let mut res = constant_pipeline(&canon.matrix, cfg)?;
    res.selection = canon.restore(&res.selection);
    res.trace.final_selection = res.selection.clone();
    if !certify_constant(m, &res.selection, &res.value) {
        return Err(Error::VerificationFailed("constant pipeline produced a non-constant block".into()));
    }
    Ok(res)
}

fn constant_pipeline(m: &DenseMatrix, cfg: &PipelineConfig) -> Result<ConstantResult> {
    if m.is_empty() {
        return Err(Error::InvalidParams("matrix is empty".into()));
    }
    if !m.is_integer() || m.to_f64_vec().iter().any(|&x| x < 0.0) {
        return Err(Error::PreconditionFailed(
            "entries must be non-negative integers".into(),
        ));
    }
    let p0 = mean(m);
    if let Some(t) = cfg.level_bound {
        if p0 > t as f64 {
            return Err(Error::PreconditionFailed(format!("mean {p0} exceeds the bound {t}")));
        }
    }
    let full = SubmatrixSelection::full(m.rows(), m.cols());
    let mut run = Run::new(m, cfg);
    run.record(Stage::Input, m, None, None);
    if m.is_constant_on(&full) {
        let value = m.get_exact(0, 0);
        return Ok(ConstantResult {
            side: full.side(),
            trace: run.finish(Termination::Trivial, rank_of(m)?, full.clone()),
            value,
            selection: full,
        });
    }
    let r = resolve_rank(m, cfg)?.max(1);
    // Shifting by a multiple of J raises the rank by at most one.
    let rs = r + 1;
    let band_low = 1.0 / (16.0 * rs as f64);
    let band_high = 1.0 - 1.0 / (rs as f64).sqrt();

    let mut found: Option<(SubmatrixSelection, BigRational)> = None;
    let termination = loop {
        let x = run.current()?;
        let local = SubmatrixSelection::full(x.rows(), x.cols());
        if x.is_constant_on(&local) {
            found = Some((run.sel.clone(), x.get_exact(0, 0)));
            break Termination::ConstantFound;
        }
        if run.halving_steps >= cfg.max_steps {
            break Termination::StepLimit;
        }
        if x.rows() < 2 || x.cols() < 2 {
            break Termination::TooSmall;
        }
        let p = mean(&x);
        let level = nearest_level(p);
        if let Some(inner) = sparse_trigger(&x, level, rs)? {
            let sel = run.sel.compose(&inner);
            run.record(Stage::ConstantTrigger, &m.submatrix(&sel)?, None, Some(level));
            found = Some((sel, BigRational::from_integer(level.into())));
            break Termination::ConstantFound;
        }
        let frac = p - level as f64;
        if frac > band_low && frac < band_high {
            let y = x.shifted(&BigRational::from_integer((-level).into()));
            run.halve(&y, StepRule::PTimesOneMinusP, ProgressForm::TwoSided, rs, Stage::Iteration, Some(level))?;
            continue;
        }
        let (h, w) = (x.rows().div_ceil(4), x.cols().div_ceil(4));
        match find_constant_rectangle(&x, h, w, None, &cfg.oracle_budget) {
            Ok(Some((inner, value))) => {
                let sel = run.sel.compose(&inner);
                run.record(Stage::Oracle, &m.submatrix(&sel)?, None, Some(level));
                found = Some((sel, value));
                break Termination::ConstantFound;
            }
            Ok(None) | Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
        run.halve(&x, StepRule::OneOverR, ProgressForm::Variant, r, Stage::Variant, Some(level))?;
    };

    let (mut sel, value, mut termination) = match found {
        Some((sel, value)) => (sel, value, termination),
        None => {
            let x = run.current()?;
            let (inner, value) = match max_constant_square(&x, None, &cfg.oracle_budget) {
                Ok(Some(b)) => (b.selection, b.value),
                Ok(None) | Err(Error::BudgetExceeded { .. }) => {
                    (SubmatrixSelection::new(vec![0], vec![0]), x.get_exact(0, 0))
                }
                Err(e) => return Err(e),
            };
            (run.sel.compose(&inner), value, Termination::OracleFallback)
        }
    };
    if cfg.extend {
        sel = extend_constant(m, &sel, &value);
        run.record(Stage::Extension, &m.submatrix(&sel)?, None, None);
    }
    let mut value = value;
    if r < 16 {
        if let Ok(Some(b)) = max_constant_square(m, None, &cfg.oracle_budget) {
            if b.size > sel.side() {
                sel = b.selection;
                value = b.value;
                termination = Termination::SmallRankFallback;
                run.record(Stage::Oracle, &m.submatrix(&sel)?, None, None);
            }
        }
    }
    if sel.is_empty() || !certify_constant(m, &sel, &value) {
        return Err(Error::VerificationFailed("constant pipeline produced a non-constant block".into()));
    }
    Ok(ConstantResult {
        side: sel.side(),
        trace: run.finish(termination, r, sel.clone()),
        value,
        selection: sel,
    })
}
