use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use serde::Serialize;

use super::constants::{grothendieck_bound, ConstantSet};
use crate::error::{Error, Result};
use crate::matcore::{
    centered, frobenius_sq, svd, variance, variance_exact, DenseMatrix, SubmatrixSelection,
    SvdResult, DEFAULT_RANK_TOL,
};
use num_traits::Zero;

/// Relative tolerance of the witness identity and norm checks.
pub const WITNESS_TOL: f64 = 1e-6;

/// Unit-ball vector assignment built from the SVD, supported on a half.
#[derive(Clone, Debug, Serialize)]
pub struct Gamma2Witness {
    /// Rows `I` and columns `J`, of sizes `⌈m/2⌉` and `⌈n/2⌉`.
    pub selection: SubmatrixSelection,
    /// `m × r`; zero outside `I`.
    pub row_vectors: Vec<Vec<f64>>,
    /// `n × r`; zero outside `J`.
    pub col_vectors: Vec<Vec<f64>>,
    /// `Σ M(i,j)⟨xᵢ, yⱼ⟩`, a lower bound on the γ₂* norm.
    pub value: f64,
    /// `√(mn)/(2σ) · ‖M[I×J]‖_F²`.
    pub closed_form: f64,
    pub nuclear_norm: f64,
    pub rank: usize,
}

fn half(k: usize) -> usize {
    k.div_ceil(2)
}

/// Keeps the `⌈k/2⌉` smallest weights; ties go to the smaller index.
fn lightest_half(weights: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    let mut keep = idx[..half(weights.len())].to_vec();
    keep.sort_unstable();
    keep
}

pub fn gamma2_witness(m: &DenseMatrix) -> Result<Gamma2Witness> {
    let s = svd(m, DEFAULT_RANK_TOL)?;
    gamma2_witness_from(m, &s)
}

pub fn gamma2_witness_from(m: &DenseMatrix, s: &SvdResult) -> Result<Gamma2Witness> {
    let (rows, cols) = (m.rows(), m.cols());
    let r = s.rank();
    if r == 0 {
        return Err(Error::PreconditionFailed("witness of the zero matrix".into()));
    }
    let sigma = s.nuclear_norm();
    let fro = frobenius_sq(m).sqrt();
    assert!(
        sigma <= (r as f64).sqrt() * fro * (1.0 + WITNESS_TOL),
        "nuclear norm {sigma} exceeds √r·‖M‖_F = {}",
        (r as f64).sqrt() * fro
    );

    let scaled = |mat: &faer::Mat<f64>, k: usize| -> Vec<Vec<f64>> {
        (0..k)
            .map(|i| (0..r).map(|c| s.singular_values[c].sqrt() * mat[(i, c)]).collect())
            .collect()
    };
    let u = scaled(&s.u, rows);
    let v = scaled(&s.v, cols);
    let sq = |x: &Vec<f64>| x.iter().map(|a| a * a).sum::<f64>();
    let un: Vec<f64> = u.iter().map(sq).collect();
    let vn: Vec<f64> = v.iter().map(sq).collect();
    let row_set = lightest_half(&un);
    let col_set = lightest_half(&vn);

    // Markov: fewer than m/2 rows exceed 2σ/m, so the kept rows all sit below it.
    let slack = 1.0 + WITNESS_TOL;
    for &i in &row_set {
        assert!(un[i] <= 2.0 * sigma / rows as f64 * slack, "row norm above 2σ/m");
    }
    for &j in &col_set {
        assert!(vn[j] <= 2.0 * sigma / cols as f64 * slack, "column norm above 2σ/n");
    }

    let (fx, fy) = ((rows as f64 / (2.0 * sigma)).sqrt(), (cols as f64 / (2.0 * sigma)).sqrt());
    let mut x = vec![vec![0.0; r]; rows];
    let mut y = vec![vec![0.0; r]; cols];
    for &i in &row_set {
        x[i] = u[i].iter().map(|a| a * fx).collect();
    }
    for &j in &col_set {
        y[j] = v[j].iter().map(|a| a * fy).collect();
    }

    let mut value = 0.0;
    let mut block = 0.0;
    for &i in &row_set {
        for &j in &col_set {
            let e = m.get(i, j);
            let dot: f64 = x[i].iter().zip(&y[j]).map(|(a, b)| a * b).sum();
            value += e * dot;
            block += e * e;
        }
    }
    let closed_form = ((rows * cols) as f64).sqrt() / (2.0 * sigma) * block;
    let scale = ((rows * cols) as f64).sqrt() / (2.0 * sigma) * fro * fro;
    assert!(
        (value - closed_form).abs() <= WITNESS_TOL * closed_form.abs().max(scale * 1e-3),
        "witness identity off: {value} vs {closed_form}"
    );
    Ok(Gamma2Witness {
        selection: SubmatrixSelection::new(row_set, col_set),
        row_vectors: x,
        col_vectors: y,
        value,
        closed_form,
        nuclear_norm: sigma,
        rank: r,
    })
}

/// Half-sized submatrix with the discrepancy lower bounds it certifies.
#[derive(Clone, Debug, Serialize)]
pub struct DiscLowerWitness {
    pub selection: SubmatrixSelection,
    /// `c₀·mn·q(M')/√(r·q(M))` with the configured `c₀`.
    pub bound: f64,
    /// `witness value / (4·K_G)`, valid for any matrix.
    pub certified_bound: f64,
    pub witness_value: f64,
    pub variance: f64,
    pub half_variance: f64,
    /// Rank of the centered matrix.
    pub rank: usize,
}

pub fn disc_lower_witness(m: &DenseMatrix, constants: &ConstantSet) -> Result<DiscLowerWitness> {
    if variance_exact(m).is_zero() {
        return Err(Error::ZeroVariance);
    }
    let m0 = centered(m);
    let w = gamma2_witness(&m0)?;
    let q = variance(m);
    let q_half = variance(&m.submatrix(&w.selection)?);
    let mn = (m.rows() * m.cols()) as f64;
    Ok(DiscLowerWitness {
        bound: constants.c0 * mn * q_half / (w.rank as f64 * q).sqrt(),
        certified_bound: w.value / (4.0 * grothendieck_bound()),
        witness_value: w.value,
        variance: q,
        half_variance: q_half,
        rank: w.rank,
        selection: w.selection,
    })
}

/// Random-hyperplane rounding of the SVD vectors of `m` to rectangles with a
/// negative entry sum, each polished by alternating best responses.
/// Returns the most negative rectangle found.
pub fn rounded_negative_rectangle(
    m: &DenseMatrix,
    samples: usize,
    seed: u64,
) -> Result<Option<(SubmatrixSelection, f64)>> {
    let s = svd(m, DEFAULT_RANK_TOL)?;
    let r = s.rank();
    if r == 0 {
        return Ok(None);
    }
    let (rows, cols) = (m.rows(), m.cols());
    let data = m.to_f64_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, Vec<usize>, f64)> = None;
    for _ in 0..samples {
        let g: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut rng)).collect();
        let side = |mat: &faer::Mat<f64>, i: usize| -> f64 {
            (0..r).map(|c| mat[(i, c)] * s.singular_values[c].sqrt() * g[c]).sum()
        };
        let su: Vec<f64> = (0..rows).map(|i| side(&s.u, i)).collect();
        for flip in [false, true] {
            let start: Vec<usize> = (0..rows).filter(|&i| (su[i] > 0.0) != flip).collect();
            if let Some((a, b, v)) = polish(&data, rows, cols, start) {
                if best.as_ref().is_none_or(|x| v < x.2) {
                    best = Some((a, b, v));
                }
            }
        }
    }
    Ok(best.map(|(a, b, v)| (SubmatrixSelection::new(a, b), v)))
}

/// Alternates columns with negative sum and rows with negative sum.
fn polish(
    data: &[f64],
    rows: usize,
    cols: usize,
    mut a: Vec<usize>,
) -> Option<(Vec<usize>, Vec<usize>, f64)> {
    let mut b: Vec<usize> = Vec::new();
    let mut value = 0.0;
    for _ in 0..32 {
        if a.is_empty() {
            return None;
        }
        let nb: Vec<usize> = (0..cols)
            .filter(|&j| a.iter().map(|&i| data[i * cols + j]).sum::<f64>() < 0.0)
            .collect();
        if nb.is_empty() {
            return None;
        }
        let na: Vec<usize> = (0..rows)
            .filter(|&i| nb.iter().map(|&j| data[i * cols + j]).sum::<f64>() < 0.0)
            .collect();
        let v: f64 = na
            .iter()
            .map(|&i| nb.iter().map(|&j| data[i * cols + j]).sum::<f64>())
            .sum();
        let stable = na == a && nb == b;
        a = na;
        b = nb;
        value = v;
        if stable {
            break;
        }
    }
    (!a.is_empty() && !b.is_empty()).then_some((a, b, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{cut_norm_exact, disc_exact, OracleBudget};
    use approx::assert_relative_eq;

    #[test]
    fn identity_witness() {
        let w = gamma2_witness(&DenseMatrix::identity(4)).unwrap();
        assert_relative_eq!(w.nuclear_norm, 4.0, epsilon = 1e-9);
        assert_eq!(w.selection.shape(), (2, 2));
        // Norms tie, so the lowest indices are kept.
        assert_eq!(w.selection.rows, vec![0, 1]);
        assert_relative_eq!(w.closed_form, 1.0, epsilon = 1e-9);
        assert_relative_eq!(w.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn all_ones_witness() {
        let w = gamma2_witness(&DenseMatrix::ones(4, 4)).unwrap();
        assert_relative_eq!(w.nuclear_norm, 4.0, epsilon = 1e-9);
        assert_relative_eq!(w.value, 2.0, epsilon = 1e-9);
        for x in w.row_vectors.iter().chain(&w.col_vectors) {
            assert!(x.iter().map(|a| a * a).sum::<f64>() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn zero_matrix_rejected() {
        assert!(matches!(
            gamma2_witness(&DenseMatrix::zeros(3, 3)),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn disc_witness_examples() {
        let k = ConstantSet::practical();
        assert_eq!(disc_lower_witness(&DenseMatrix::ones(3, 3), &k).unwrap_err(), Error::ZeroVariance);
        let i2 = DenseMatrix::identity(2);
        let d = disc_lower_witness(&i2, &k).unwrap();
        let exact = disc_exact(&i2, &OracleBudget::default()).unwrap().value_f64();
        assert_relative_eq!(exact, 0.5);
        assert!(d.bound <= exact && d.certified_bound <= exact);

        let shifted = DenseMatrix::from_fn(2, 2, |i, j| if i == j { 8.0 } else { 7.0 });
        let d2 = disc_lower_witness(&shifted, &k).unwrap();
        assert_eq!(d.selection, d2.selection);
        assert_relative_eq!(d.bound, d2.bound, epsilon = 1e-12);
    }

    #[test]
    fn witness_against_cut_norm() {
        let m = DenseMatrix::from_i64(3, 4, &[1, -2, 3, 0, 2, 2, -1, 1, 0, 3, -3, 2]).unwrap();
        let w = gamma2_witness(&m).unwrap();
        let cut = cut_norm_exact(&m, &OracleBudget::default()).unwrap().value_f64();
        assert!(w.value <= 4.0 * grothendieck_bound() * cut);
    }

    #[test]
    fn rounding_finds_negative_block() {
        let m = centered(&DenseMatrix::from_fn(6, 6, |i, j| if i < 3 && j < 3 { 0.0 } else { 1.0 }));
        let (sel, v) = rounded_negative_rectangle(&m, 16, 1).unwrap().unwrap();
        assert!(v < 0.0);
        assert_eq!(sel.shape(), (3, 3));
    }
}
