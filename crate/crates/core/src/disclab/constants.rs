use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Krivine's upper bound `π / (2 ln(1 + √2))` on the real Grothendieck constant.
pub fn grothendieck_bound() -> f64 {
    std::f64::consts::PI / (2.0 * (1.0 + 2f64.sqrt()).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantTag {
    Proven,
    Practical,
}

impl std::str::FromStr for ConstantTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proven" => Ok(ConstantTag::Proven),
            "practical" => Ok(ConstantTag::Practical),
            _ => Err(Error::Parse(format!("unknown constant set `{s}`"))),
        }
    }
}

/// Every absolute constant used by the halving machinery, in one place.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantSet {
    pub tag: ConstantTag,
    /// Step constant for the `√(p/r)` and `√(p(1−p)/r)` rules.
    pub c: f64,
    /// Step constant for the `1/r` rule.
    pub c_variant: f64,
    /// Constant of the discrepancy lower bound `disc ≥ c₀·mn·q'/√(rq)`.
    pub c0: f64,
    /// Variance contraction required by the second outcome.
    pub alpha: f64,
    pub alpha_variant: f64,
    /// Divisor in the guaranteed average drop `disc/(d·mn)`.
    pub half_divisor: f64,
}

impl ConstantSet {
    /// `c₀ = 1/(32·K_G)` is what the SVD witness certifies with ceilings on
    /// the half sizes; `c` and the variant constant follow the proofs.
    pub fn proven() -> Self {
        let c0 = 1.0 / (32.0 * grothendieck_bound());
        let alpha = 2f64.powi(-100);
        let alpha_variant = 2f64.powi(-200);
        ConstantSet {
            tag: ConstantTag::Proven,
            c: (alpha * c0 / 30.0).min(1e-4),
            c_variant: alpha_variant * c0,
            c0,
            alpha,
            alpha_variant,
            half_divisor: 3.0,
        }
    }

    pub fn practical() -> Self {
        ConstantSet {
            tag: ConstantTag::Practical,
            c: 0.1,
            c_variant: 0.1,
            c0: 1.0 / (32.0 * grothendieck_bound()),
            alpha: 0.5,
            alpha_variant: 0.5,
            half_divisor: 3.0,
        }
    }

    pub fn from_tag(tag: ConstantTag) -> Self {
        match tag {
            ConstantTag::Proven => Self::proven(),
            ConstantTag::Practical => Self::practical(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !(pos(self.c) && pos(self.c_variant) && pos(self.c0) && pos(self.half_divisor)) {
            return Err(Error::InvalidParams("constants must be positive and finite".into()));
        }
        if !(pos(self.alpha) && self.alpha < 1.0 && pos(self.alpha_variant) && self.alpha_variant < 1.0) {
            return Err(Error::InvalidParams("variance contraction must lie in (0, 1)".into()));
        }
        if self.tag == ConstantTag::Proven && self.c > 1e-4 {
            return Err(Error::InvalidParams("proven constants need c ≤ 1e-4".into()));
        }
        Ok(())
    }
}
