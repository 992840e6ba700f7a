use rand::Rng;
use serde::{Deserialize, Serialize};

use super::random_union::trial_rng;
use crate::error::{Error, Result};
use crate::famcore::{build_graph, BitSet, SetFamily};

/// `log₂(e⁴⁰)`, the additive constant in `k` when running faithfully.
pub const PROVEN_K_CONSTANT: f64 = 40.0 * std::f64::consts::LOG2_E;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DrcConfig {
    /// Additive constant in `k = log₂(1/θ) + c` for ordinary runs.
    pub c_run: f64,
    /// Use `c = log₂(e⁴⁰)` instead of `c_run`.
    pub proven_constant: bool,
    /// Number of independent draws of the `t` anchor sets.
    pub attempts: usize,
    /// Tuples sampled from each common neighbourhood.
    pub tuples_per_attempt: usize,
}

impl Default for DrcConfig {
    fn default() -> Self {
        DrcConfig {
            c_run: 8.0,
            proven_constant: false,
            attempts: 64,
            tuples_per_attempt: 256,
        }
    }
}

/// Parameters derived from the inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DrcParams {
    pub n: usize,
    pub theta: f64,
    /// `max{θn, √(θn·log₂n)}`.
    pub big_m: f64,
    /// `max{√(log₂n/(θn)), 1}`; `t_count = ⌈t⌉` anchors are drawn.
    pub t: f64,
    pub t_count: usize,
    /// `log₂(1/θ) + c`; `k_count = ⌈k⌉` sets form a tuple.
    pub k: f64,
    pub k_count: usize,
    /// `n − log₂|A| + 5M`.
    pub s: f64,
}

impl DrcParams {
    pub fn new(n: usize, a_len: usize, theta: f64, c: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidParams(format!("theta {theta} is outside (0, 1]")));
        }
        if a_len == 0 {
            return Err(Error::EmptyFamily);
        }
        let nf = n as f64;
        let log_n = if n > 1 { nf.log2() } else { 0.0 };
        let big_m = (theta * nf).max((theta * nf * log_n).sqrt());
        let t = if n > 0 { (log_n / (theta * nf)).sqrt().max(1.0) } else { 1.0 };
        let k = (1.0 / theta).log2() + c;
        Ok(DrcParams {
            n,
            theta,
            big_m,
            t,
            t_count: t.ceil() as usize,
            k,
            k_count: (k.ceil() as usize).max(1),
            s: nf - (a_len as f64).log2() + 5.0 * big_m,
        })
    }
}

/// Common neighbourhood size and union size of one tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TupleCheck {
    pub neighborhood: usize,
    pub union_size: usize,
    /// `|N(A₁, …, A_k)| ≥ 2^s`.
    pub friendly: bool,
    /// `|A₁ ∪ … ∪ A_k| ≥ n − s + 1`.
    pub wide: bool,
}

/// Checks a tuple of members of `a` against `b` directly.
pub fn check_tuple(a: &SetFamily, b: &SetFamily, tuple: &[usize], s: f64) -> TupleCheck {
    let mut u = BitSet::new(a.universe());
    for &i in tuple {
        u.union_with(a.get(i));
    }
    let neighborhood = b.iter().filter(|y| y.is_disjoint(&u)).count();
    let union_size = u.len();
    TupleCheck {
        neighborhood,
        union_size,
        friendly: neighborhood > 0 && (neighborhood as f64).log2() >= s,
        wide: union_size as f64 >= a.universe() as f64 - s + 1.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DrcWitness {
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub anchors: Vec<usize>,
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub tuple: Vec<usize>,
    pub check: TupleCheck,
    pub params: DrcParams,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DrcStats {
    pub params: Option<DrcParams>,
    pub attempts: usize,
    pub empty_neighborhoods: usize,
    pub tuples_examined: usize,
    pub friendly: usize,
    pub wide: usize,
    pub mean_neighborhood: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DrcOutcome {
    Found(DrcWitness),
    /// No friendly-and-wide tuple among the sampled ones. Not a disproof.
    Exhausted(DrcStats),
}

/// Dependent random choice: draw anchors from `b`, restrict `a` to their
/// common neighbourhood, and sample `k`-tuples from it looking for one that
/// is both friendly and wide.
pub fn drc_witness_search(
    a: &SetFamily,
    b: &SetFamily,
    theta: f64,
    seed: u64,
    cfg: &DrcConfig,
) -> Result<DrcOutcome> {
    let g = build_graph(a, b)?;
    let c = if cfg.proven_constant { PROVEN_K_CONSTANT } else { cfg.c_run };
    let params = DrcParams::new(a.universe(), a.len(), theta, c)?;
    let mut stats = DrcStats {
        params: Some(params.clone()),
        attempts: 0,
        empty_neighborhoods: 0,
        tuples_examined: 0,
        friendly: 0,
        wide: 0,
        mean_neighborhood: 0.0,
        reason: String::new(),
    };
    if b.is_empty() || g.edge_count() == 0 {
        stats.reason = "no disjoint pairs".into();
        return Ok(DrcOutcome::Exhausted(stats));
    }
    let mut total_nb = 0usize;
    for attempt in 0..cfg.attempts {
        let mut rng = trial_rng(seed, attempt as u64);
        stats.attempts += 1;
        let anchors: Vec<usize> = (0..params.t_count).map(|_| rng.gen_range(0..b.len())).collect();
        let pool: Vec<usize> = g.common_neighbors_of_right(&anchors).iter().collect();
        if pool.is_empty() {
            stats.empty_neighborhoods += 1;
            continue;
        }
        total_nb += pool.len();
        for _ in 0..cfg.tuples_per_attempt {
            let tuple: Vec<usize> = (0..params.k_count)
                .map(|_| pool[rng.gen_range(0..pool.len())])
                .collect();
            let check = check_tuple(a, b, &tuple, params.s);
            stats.tuples_examined += 1;
            stats.friendly += check.friendly as usize;
            stats.wide += check.wide as usize;
            if check.friendly && check.wide {
                return Ok(DrcOutcome::Found(DrcWitness {
                    anchors,
                    tuple,
                    check,
                    params,
                }));
            }
        }
    }
    let filled = stats.attempts - stats.empty_neighborhoods;
    stats.mean_neighborhood = if filled > 0 { total_nb as f64 / filled as f64 } else { 0.0 };
    stats.reason = "attempts exhausted".into();
    Ok(DrcOutcome::Exhausted(stats))
}
