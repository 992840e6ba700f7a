use serde::{Deserialize, Serialize};

use crate::disclab::{ConstantSet, ConstantTag, HalfMode, StepCase};
use crate::error::{Error, Result};
use crate::matcore::SubmatrixSelection;
use crate::oracles::OracleBudget;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub constants: ConstantSet,
    /// Rank bound; the exact or numerical rank is computed when absent.
    pub rank: Option<usize>,
    pub max_steps: usize,
    /// Stop once the mean is at most `1/(low_stop·r)`.
    pub low_stop: f64,
    /// Stop once the mean reaches this value.
    pub high_stop: f64,
    /// Overrides the `Δ` of every progress function.
    pub delta: Option<f64>,
    /// Budget of the exact searches inside each halving step.
    pub step_budget: OracleBudget,
    /// Budget of exact constant-block searches used as fallbacks.
    pub oracle_budget: OracleBudget,
    pub half_mode: HalfMode,
    /// Upper bound on the mean for the integer pipeline; `⌈p⌉` when absent.
    pub level_bound: Option<u64>,
    /// Greedily add rows and columns that keep the final block constant.
    pub extend: bool,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::with_constants(ConstantSet::practical())
    }
}

impl PipelineConfig {
    pub fn with_constants(constants: ConstantSet) -> Self {
        PipelineConfig {
            constants,
            rank: None,
            max_steps: 64,
            low_stop: 16.0,
            high_stop: 0.8,
            delta: None,
            step_budget: OracleBudget::branch_and_bound(),
            oracle_budget: OracleBudget::with_dims(40, 40),
            half_mode: HalfMode::Auto,
            level_bound: None,
            extend: true,
            seed: 0,
        }
    }

    pub fn proven() -> Self {
        Self::with_constants(ConstantSet::proven())
    }

    /// Proven constants turn every certificate and progress quantum into a hard check.
    pub fn audit(&self) -> bool {
        self.constants.tag == ConstantTag::Proven
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if self.max_steps == 0 {
            return Err(Error::InvalidParams("max_steps must be at least 1".into()));
        }
        if !(self.low_stop > 0.0 && self.high_stop > 0.0 && self.high_stop <= 1.0) {
            return Err(Error::InvalidParams("stop thresholds out of range".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidParams("delta must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn main_delta(&self, r: usize) -> f64 {
        self.delta.unwrap_or(400.0 * (r as f64).powi(2))
    }

    pub fn two_sided_delta(&self, r: usize) -> f64 {
        self.delta.unwrap_or(1e4 * r as f64)
    }
}

/// Potentials that bound the number of halving steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProgressValues {
    /// `√(rp) + (c/10)·log₂(Δq)` with `Δ = 400r²`.
    pub main: f64,
    /// `√(rp) + √r − √(r(1−p))`.
    pub two_sided_mean: f64,
    /// `(c/10)·log₂(Δq)` with `Δ = 10⁴r`.
    pub two_sided_variance: f64,
    /// `rp + (c/10)·log₂(Δq)` with `Δ = 10⁴r`.
    pub variant: f64,
}

pub fn progress_values(p: f64, q: f64, r: usize, cfg: &PipelineConfig) -> ProgressValues {
    let rf = r as f64;
    let c = cfg.constants.c;
    let cv = cfg.constants.c_variant;
    let g = |cc: f64, delta: f64| cc / 10.0 * (delta * q).log2();
    ProgressValues {
        main: (rf * p).sqrt() + g(c, cfg.main_delta(r)),
        two_sided_mean: (rf * p).sqrt() + rf.sqrt() - (rf * (1.0 - p)).sqrt(),
        two_sided_variance: g(c, cfg.two_sided_delta(r)),
        variant: rf * p + g(cv, cfg.two_sided_delta(r)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgressForm {
    Main,
    TwoSided,
    Variant,
}

impl ProgressForm {
    /// Guaranteed decrease per certified step.
    pub fn quantum(self, k: &ConstantSet) -> f64 {
        match self {
            ProgressForm::Main => k.c / 4.0,
            ProgressForm::TwoSided => k.c / 20.0,
            ProgressForm::Variant => k.c_variant / 2.0,
        }
    }

    pub fn value(self, v: &ProgressValues) -> f64 {
        match self {
            ProgressForm::Main => v.main,
            ProgressForm::TwoSided => v.two_sided_mean + v.two_sided_variance,
            ProgressForm::Variant => v.variant,
        }
    }
}

/// `F(p, q) − F(p', q')` with `mean_drop = p − p'` supplied exactly, so the
/// difference keeps full relative precision even when it is tiny.
pub fn progress_drop(
    form: ProgressForm,
    p: f64,
    mean_drop: f64,
    q: f64,
    q_next: f64,
    r: usize,
    k: &ConstantSet,
) -> f64 {
    let rf = r as f64;
    let p_next = p - mean_drop;
    let c = match form {
        ProgressForm::Variant => k.c_variant,
        _ => k.c,
    };
    let dg = if q_next == 0.0 {
        f64::INFINITY
    } else {
        c / 10.0 * (q.log2() - q_next.log2())
    };
    let sqrt_diff = |a: f64, b: f64, d: f64| {
        if a <= 0.0 && b <= 0.0 {
            0.0
        } else {
            d / (a.max(0.0).sqrt() + b.max(0.0).sqrt())
        }
    };
    let dp = match form {
        ProgressForm::Main => rf.sqrt() * sqrt_diff(p, p_next, mean_drop),
        ProgressForm::TwoSided => {
            rf.sqrt()
                * (sqrt_diff(p, p_next, mean_drop) + sqrt_diff(1.0 - p_next, 1.0 - p, mean_drop))
        }
        ProgressForm::Variant => rf * mean_drop,
    };
    dp + dg
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Input,
    Regularize,
    Halving,
    Iteration,
    Variant,
    Sparse,
    ConstantTrigger,
    Oracle,
    Extension,
}

/// State after one pipeline stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub stage: Stage,
    pub rows: usize,
    pub cols: usize,
    pub mean: f64,
    pub variance: f64,
    pub case: Option<StepCase>,
    /// Potential of the stage's progress form, when one applies.
    pub progress: Option<f64>,
    /// Decrease of that potential over the step.
    pub progress_drop: Option<f64>,
    pub level: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Trivial,
    LowMean,
    HighMean,
    StepLimit,
    TooSmall,
    ConstantFound,
    OracleFallback,
    SmallRankFallback,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineTrace {
    pub steps: Vec<TraceStep>,
    pub termination: Termination,
    pub rank: usize,
    pub halving_steps: usize,
    pub uncertified_steps: usize,
    /// Exact searches that certified neither outcome (practical mode only).
    pub falsified_steps: usize,
    pub final_selection: SubmatrixSelection,
}
