use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::params::{default_union_size, ExtractionParams};
use crate::error::{Error, Result};
use crate::famcore::{disjoint_pairs, BitSet, SetFamily};

/// Generator for trial `i` of a run seeded with `seed`. Trials use distinct
/// streams of one key, so no two (seed, trial) pairs share a sequence.
pub fn trial_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// 1-based elements of the union.
    pub union: Vec<usize>,
    pub left_size: usize,
    pub right_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extraction {
    /// Indices into the first family; every such set lies inside the union.
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub left: Vec<usize>,
    /// Indices into the second family; every such set avoids the union.
    #[serde(serialize_with = "crate::serde_util::one_based")]
    pub right: Vec<usize>,
    pub k: usize,
    pub trials: usize,
    pub best_trial: Option<usize>,
    pub best_product: u128,
    pub measured_density: f64,
    pub used_star_fallback: bool,
    pub trace: Vec<TrialRecord>,
}

impl Extraction {
    pub fn left_family(&self, a: &SetFamily) -> SetFamily {
        a.subfamily(&self.left)
    }

    pub fn right_family(&self, b: &SetFamily) -> SetFamily {
        b.subfamily(&self.right)
    }
}

struct Trial {
    union: BitSet,
    left: usize,
    right: usize,
}

fn run_trial(a: &SetFamily, b: &SetFamily, k: usize, seed: u64, i: usize) -> Trial {
    let mut rng = trial_rng(seed, i as u64);
    let mut u = BitSet::new(a.universe());
    for _ in 0..k {
        u.union_with(a.get(rng.gen_range(0..a.len())));
    }
    let comp = u.complement();
    Trial {
        left: a.count_subsets_of(&u),
        right: b.count_subsets_of(&comp),
        union: u,
    }
}

/// Takes the union `U` of `k` random members of `a` and returns the members
/// of `a` inside `U` and the members of `b` outside it; the best of
/// `params.trials` draws by `|R|·|S|` is kept, ties going to the lower trial.
pub fn random_union_extract(
    a: &SetFamily,
    b: &SetFamily,
    params: &ExtractionParams,
) -> Result<Extraction> {
    params.validate()?;
    let pc = disjoint_pairs(a, b)?;
    if pc.count == 0 {
        return Err(Error::NoDisjointPairs);
    }
    let n = a.universe();
    let k = params
        .k_override
        .unwrap_or_else(|| default_union_size(n, pc.density));

    let results: Vec<Trial> = (0..params.trials)
        .into_par_iter()
        .map(|i| run_trial(a, b, k, params.seed, i))
        .collect();
    let (best_idx, best) = results
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| {
            let px = x.left as u128 * x.right as u128;
            let py = y.left as u128 * y.right as u128;
            px.cmp(&py).then(j.cmp(i))
        })
        .expect("at least one trial");
    let best_product = best.left as u128 * best.right as u128;

    let trace = if params.keep_trace {
        results
            .iter()
            .enumerate()
            .map(|(i, t)| TrialRecord {
                trial: i,
                union: t.union.to_one_based(),
                left_size: t.left,
                right_size: t.right,
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut out = Extraction {
        left: Vec::new(),
        right: Vec::new(),
        k,
        trials: params.trials,
        best_trial: None,
        best_product: 0,
        measured_density: pc.density,
        used_star_fallback: false,
        trace,
    };
    if best_product > 0 {
        let comp = best.union.complement();
        out.left = (0..a.len()).filter(|&i| a.get(i).is_subset(&best.union)).collect();
        out.right = (0..b.len()).filter(|&j| b.get(j).is_subset(&comp)).collect();
        out.best_trial = Some(best_idx);
        out.best_product = best_product;
    } else if params.star_fallback {
        let (i, deg) = (0..a.len())
            .map(|i| (i, b.iter().filter(|y| a.get(i).is_disjoint(y)).count()))
            .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
            .expect("nonempty family");
        out.left = vec![i];
        out.right = (0..b.len()).filter(|&j| a.get(i).is_disjoint(b.get(j))).collect();
        out.best_product = deg as u128;
        out.used_star_fallback = true;
    }
    if !crate::oracles::certify_cross_disjoint(a, b, &out.left, &out.right) {
        return Err(Error::VerificationFailed("extracted families are not cross-disjoint".into()));
    }
    Ok(out)
}

/// Outcome of testing whether `u` covers too few members of a family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BadSetCheck {
    pub bad: bool,
    pub covered: usize,
}

/// `u` is bad when fewer than `threshold·|F|` members of `f` lie inside it.
pub fn is_bad_set(u: &BitSet, f: &SetFamily, threshold: f64) -> Result<BadSetCheck> {
    if u.universe() != f.universe() {
        return Err(Error::UniverseMismatch {
            left: u.universe(),
            right: f.universe(),
        });
    }
    let covered = f.count_subsets_of(u);
    Ok(BadSetCheck {
        bad: (covered as f64) < threshold * f.len() as f64,
        covered,
    })
}

/// `2^(−2n/k)`, the coverage fraction below which a union is bad.
pub fn bad_set_threshold(n: usize, k: usize) -> f64 {
    (-2.0 * n as f64 / k as f64).exp2()
}
