use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings for the random-union extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionParams {
    /// Target density in `(0, 1)`. The measured density drives `k`; this
    /// value is kept for reporting and for the size bounds.
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Number of sets whose union is taken; derived from the density when unset.
    pub k_override: Option<usize>,
    /// Fall back to a maximum-degree star when every trial has an empty side.
    pub star_fallback: bool,
    /// Keep one trace record per trial.
    pub keep_trace: bool,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams {
            delta: 0.5,
            trials: 64,
            seed: 0,
            k_override: None,
            star_fallback: true,
            keep_trace: true,
        }
    }
}

impl ExtractionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta {} is outside (0, 1)", self.delta)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParams("at least one trial is required".into()));
        }
        if self.k_override == Some(0) {
            return Err(Error::InvalidParams("k must be positive".into()));
        }
        Ok(())
    }
}

/// `⌊√(n / log₂(1/δ))⌋` clamped to `[1, max(n, 1)]`.
pub fn default_union_size(n: usize, density: f64) -> usize {
    let cap = n.max(1);
    let l = (1.0 / density).log2();
    if !(l > 0.0) {
        return cap;
    }
    ((n as f64 / l).sqrt().floor() as usize).clamp(1, cap)
}
