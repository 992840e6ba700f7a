use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use zerorect_core::constructions::{c2_structural_max, gen_c2, gen_c3, gen_c4, gen_pbiased, PBiased};
use zerorect_core::disclab::{gamma2_witness, half_average_deviation_check};
use zerorect_core::distribution::Distribution;
use zerorect_core::extract::{
    check_cleaned, clean_disjointness_graph, covering_probability_mc, random_union_extract, ExtractionParams,
};
use zerorect_core::famcore::{build_graph, disjoint_pairs, lambda_pairs, BitSet, SetFamily};
use zerorect_core::matcore::{
    distance_to_constant_sq, exact_rank, frobenius_sq, mean, mean_exact, svd, variance, variance_exact, DenseMatrix,
    DEFAULT_RANK_TOL,
};
use zerorect_core::oracles::{
    certify_constant, certify_cross_disjoint, covering_probability_exact, cut_norm_exact, disc_exact,
    max_constant_square, OracleBudget,
};
use zerorect_core::spectral::{even_odd_check, intersection_distribution, parseval_check};
use zerorect_core::zerorect::{
    find_constant_submatrix_int, find_zero_submatrix, progress_values, sparse_zero_extract, PipelineConfig, Stage,
};

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn family(n: usize, max_len: usize) -> impl Strategy<Value = SetFamily> {
    prop::collection::vec(0..1u64 << n, 1..=max_len)
        .prop_map(move |ms| SetFamily::from_sets(n, ms.into_iter().map(|m| BitSet::from_mask(n, m)).collect()).unwrap())
}

fn family_pair(max_n: usize, max_len: usize) -> impl Strategy<Value = (SetFamily, SetFamily)> {
    (1..=max_n).prop_flat_map(move |n| (family(n, max_len), family(n, max_len)))
}

fn int_matrix(max_side: usize, lo: i64, hi: i64) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(m, n)| {
        prop::collection::vec(lo..=hi, m * n).prop_map(move |d| DenseMatrix::from_i64_rational(m, n, &d).unwrap())
    })
}

/// 0/1 matrix whose rows repeat one of `r` prototypes, so its rank is at most `r`.
fn low_rank_01(max_side: usize, r: usize) -> impl Strategy<Value = DenseMatrix> {
    (2..=max_side, 2..=max_side).prop_flat_map(move |(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(0..2i64, n), r),
            prop::collection::vec(0..r, m),
        )
            .prop_map(move |(protos, pick)| {
                let data: Vec<i64> = pick.iter().flat_map(|&k| protos[k].clone()).collect();
                DenseMatrix::from_i64_rational(m, n, &data).unwrap()
            })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Set families.

    #[test]
    fn disjoint_pairs_are_lambda_zero((a, b) in family_pair(8, 20)) {
        prop_assert_eq!(disjoint_pairs(&a, &b).unwrap().count, lambda_pairs(&a, &b, 0).unwrap());
    }

    #[test]
    fn lambda_pairs_partition_all_pairs((a, b) in family_pair(8, 20)) {
        let n = a.universe();
        let total: u128 = (0..=n).map(|l| lambda_pairs(&a, &b, l).unwrap()).sum();
        prop_assert_eq!(total, (a.len() * b.len()) as u128);
    }

    #[test]
    fn density_is_universe_permutation_invariant(
        (a, b, perm) in family_pair(8, 20).prop_flat_map(|(a, b)| { let n = a.universe(); (Just(a), Just(b), permutation(n)) })
    ) {
        let before = disjoint_pairs(&a, &b).unwrap();
        let after = disjoint_pairs(&a.permuted(&perm), &b.permuted(&perm)).unwrap();
        prop_assert_eq!(before.count, after.count);
    }

    // Matrices.

    #[test]
    fn variance_is_minimal_distance_to_constant(m in int_matrix(8, -5, 5), t in -10.0f64..10.0) {
        let mn = m.len() as f64;
        let q = variance(&m);
        let scale = 1.0 + frobenius_sq(&m);
        prop_assert!(distance_to_constant_sq(&m, t) >= q * mn - 1e-9 * scale);
        prop_assert!((distance_to_constant_sq(&m, mean(&m)) - q * mn).abs() <= 1e-9 * scale);
    }

    #[test]
    fn singular_values_carry_frobenius_mass(m in int_matrix(12, -4, 4)) {
        let f = m.to_float();
        let s = svd(&f, DEFAULT_RANK_TOL).unwrap();
        let mass: f64 = s.singular_values.iter().map(|x| x * x).sum();
        let fro = frobenius_sq(&f);
        prop_assert!((mass - fro).abs() <= 1e-8 * fro.max(1.0));
    }

    #[test]
    fn exact_and_float_statistics_agree(m in int_matrix(16, -9, 9)) {
        let f = m.to_float();
        let p = zerorect_core::matcore::rational_to_f64(&mean_exact(&m));
        let q = zerorect_core::matcore::rational_to_f64(&variance_exact(&m));
        prop_assert!((mean(&f) - p).abs() <= 1e-10 * p.abs().max(1.0));
        prop_assert!((variance(&f) - q).abs() <= 1e-10 * q.abs().max(1.0));
    }

    // Exact oracles.

    #[test]
    fn disc_is_cut_norm_of_centered(m in int_matrix(7, -3, 3)) {
        let b = OracleBudget::default();
        let disc = disc_exact(&m, &b).unwrap().value;
        let p = mean_exact(&m);
        prop_assert_eq!(&disc, &cut_norm_exact(&m.shifted(&-p.clone()), &b).unwrap().value);
        let mn = BigRational::from_integer(BigInt::from(m.len()));
        let cut = cut_norm_exact(&m, &b).unwrap().value;
        let abs_p = if p < BigRational::zero() { -p } else { p };
        prop_assert!(disc <= cut + abs_p * mn);
    }

    #[test]
    fn disc_ignores_shift_permutation_and_negation(
        (m, rp, cp) in int_matrix(6, -3, 3).prop_flat_map(|m| { let (r, c) = (m.rows(), m.cols()); (Just(m), permutation(r), permutation(c)) }),
        shift in -3i64..=3,
    ) {
        let b = OracleBudget::default();
        let d = disc_exact(&m, &b).unwrap().value;
        prop_assert_eq!(&d, &disc_exact(&m.shifted(&ratio(shift, 1)), &b).unwrap().value);
        prop_assert_eq!(&d, &disc_exact(&m.permuted(&rp, &cp), &b).unwrap().value);
        prop_assert_eq!(&d, &disc_exact(&m.negated(), &b).unwrap().value);
    }

    #[test]
    fn constant_square_is_certified(m in int_matrix(8, 0, 2)) {
        let b = OracleBudget::default();
        if let Some(block) = max_constant_square(&m, None, &b).unwrap() {
            prop_assert!(certify_constant(&m, &block.selection, &block.value));
        }
    }

    #[test]
    fn witness_relations_hold(m in int_matrix(8, -3, 3)) {
        let f = m.to_float();
        if let Ok(w) = gamma2_witness(&f) {
            let cut = zerorect_core::matcore::rational_to_f64(&cut_norm_exact(&m, &OracleBudget::default()).unwrap().value);
            prop_assert!(w.value <= 1.8 * cut + 1e-9);
            prop_assert!((w.value - w.closed_form).abs() <= 1e-6 * w.value.abs().max(1.0));
            let fro = frobenius_sq(&f).sqrt();
            prop_assert!(w.nuclear_norm <= (w.rank as f64).sqrt() * fro * (1.0 + 1e-9));
        }
    }

    #[test]
    fn halves_stay_near_the_mean(m in int_matrix(7, -3, 3).prop_filter("two by two", |m| m.rows() >= 2 && m.cols() >= 2)) {
        prop_assert!(half_average_deviation_check(&m, &OracleBudget::default()).unwrap().holds);
    }

    // Extraction and covering.

    #[test]
    fn random_union_output_is_cross_disjoint((a, b) in family_pair(10, 30), seed in any::<u64>()) {
        prop_assume!(disjoint_pairs(&a, &b).unwrap().count > 0);
        let params = ExtractionParams { seed, trials: 8, ..ExtractionParams::default() };
        let ex = random_union_extract(&a, &b, &params).unwrap();
        prop_assert!(certify_cross_disjoint(&a, &b, &ex.left, &ex.right));
        prop_assert!(!ex.left.is_empty() && !ex.right.is_empty());
    }

    #[test]
    fn cleaning_meets_its_degree_bounds((a, b) in family_pair(6, 24)) {
        let g = build_graph(&a, &b).unwrap();
        let density = disjoint_pairs(&a, &b).unwrap().density;
        prop_assume!(density > 0.0);
        let eps = density / 2.0;
        let c = clean_disjointness_graph(&g, eps).unwrap();
        prop_assert!(check_cleaned(g.graph(), eps, &c).is_ok());
    }

    // Fourier side.

    #[test]
    fn parseval_is_exact((a, b) in family_pair(8, 30), pi in 0usize..3) {
        let p = [2u64, 3, 5][pi];
        prop_assert!(parseval_check(&intersection_distribution(&a, &b, p).unwrap()).holds);
    }

    #[test]
    fn even_odd_bound_holds((a, b) in family_pair(8, 30)) {
        prop_assert!(even_odd_check(&a.dedup(), &b.dedup()).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Pipelines.

    #[test]
    fn sparse_matching_never_exceeds_rank(m in low_rank_01(24, 3)) {
        let rank = exact_rank(&m).max(1);
        if let Ok(ex) = sparse_zero_extract(&m, rank) {
            prop_assert!(ex.matching <= exact_rank(&m));
            prop_assert!(m.is_zero_on(&ex.selection));
        }
    }

    #[test]
    fn zero_pipeline_selection_is_verified(m in low_rank_01(20, 4), seed in 0u64..4) {
        let cfg = PipelineConfig { seed, ..PipelineConfig::default() };
        match find_zero_submatrix(&m, &cfg) {
            Ok(z) => {
                prop_assert!(m.is_zero_on(&z.selection));
                let mut last = (m.rows(), m.cols());
                for s in z.trace.steps.iter().filter(|s| s.stage == Stage::Halving) {
                    prop_assert!(s.rows <= last.0 && s.cols <= last.1);
                    last = (s.rows, s.cols);
                }
            }
            Err(zerorect_core::error::Error::EmptyResult(_)) => prop_assert!(mean(&m) > 0.5),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn constant_pipeline_selection_is_verified(m in low_rank_01(16, 4)) {
        let c = find_constant_submatrix_int(&m, &PipelineConfig::default()).unwrap();
        prop_assert!(certify_constant(&m, &c.selection, &c.value));
    }

    #[test]
    fn pipeline_size_survives_permutation(
        (m, rp, cp) in low_rank_01(16, 3).prop_flat_map(|m| { let (r, c) = (m.rows(), m.cols()); (Just(m), permutation(r), permutation(c)) }),
    ) {
        let cfg = PipelineConfig::default();
        let a = find_constant_submatrix_int(&m, &cfg).unwrap();
        let b = find_constant_submatrix_int(&m.permuted(&rp, &cp), &cfg).unwrap();
        prop_assert_eq!(a.selection.shape(), b.selection.shape());
    }

    #[test]
    fn main_potential_falls_with_the_mean(p in 0.01f64..0.5, dp in 0.001f64..0.01, q in 0.01f64..0.25, r in 1usize..8) {
        let cfg = PipelineConfig::default();
        let hi = progress_values(p, q, r, &cfg);
        let lo = progress_values(p - dp.min(p / 2.0), q, r, &cfg);
        prop_assert!(lo.main < hi.main);
        prop_assert!(lo.variant < hi.variant);
    }
}

// Constructions.

#[test]
fn c2_nonzero_fraction_matches_formula() {
    for (r, k) in [(6, 1), (8, 2), (10, 2), (12, 3)] {
        let (_, m) = gen_c2(r, k).unwrap();
        let total = BigRational::from_integer(BigInt::from(m.len()));
        let nonzero = BigRational::from_integer(BigInt::from(m.count_nonzero()));
        let binom = |a: u64, b: u64| BigInt::from(num_integer::binomial(a, b));
        let formula = BigRational::one() - BigRational::new(binom(r as u64 - k as u64, k as u64), binom(r as u64, k as u64));
        assert_eq!(nonzero / total, formula, "C2({r},{k})");
    }
}

#[test]
fn c2_structural_max_matches_oracle() {
    let b = OracleBudget::with_dims(256, 256);
    for (r, k) in [(4, 1), (6, 1), (6, 2), (8, 2), (10, 2)] {
        let (_, m) = gen_c2(r, k).unwrap();
        let oracle = max_constant_square(&m, Some(&BigRational::zero()), &b).unwrap().map_or(0, |x| x.selection.side());
        assert_eq!(oracle as u128, c2_structural_max(r, k), "C2({r},{k})");
    }
}

#[test]
fn c3_zero_count_formula() {
    for r in [4usize, 8] {
        let m = gen_c3(r).unwrap();
        let zeros = m.len() - m.count_nonzero();
        let expected = num_integer::binomial(r, r / 4) * 3usize.pow((3 * r / 4) as u32);
        assert_eq!(zeros, expected, "C3({r})");
    }
}

#[test]
fn c4_cap_is_never_exceeded() {
    let b = OracleBudget::with_dims(128, 128);
    for k in 1..=4usize {
        for r in 1..=4usize {
            let n = (2 * k + 1).pow(r as u32);
            if n > 100 {
                continue;
            }
            let m = gen_c4(r, k).unwrap();
            let side = max_constant_square(&m, None, &b).unwrap().map_or(0, |x| x.selection.side());
            // (2k+1)^(r/2) squared is n, so the cap on the side is ⌊√n⌋.
            assert!(side * side <= n, "C4 k={k} r={r}: side {side}");
        }
    }
}

#[test]
fn pbiased_covering_matches_closed_form() {
    let budget = OracleBudget::default();
    for n in 1..=8usize {
        for r in 1..=3usize {
            for (a, b) in [(1, 4), (1, 3), (1, 2)] {
                let p = ratio(a, b);
                let PBiased::Explicit(mu) = gen_pbiased(n, &p).unwrap() else { panic!("small n is explicit") };
                let exact = covering_probability_exact(&mu, r, &budget).unwrap();
                // An element of the target is uncovered by one draw with probability 1 − p.
                let miss = BigRational::one() - &p;
                let per_element = BigRational::one() - &p + &p * (BigRational::one() - num_traits::pow(miss, r));
                assert_eq!(exact, num_traits::pow(per_element, n), "n={n} r={r} p={p}");
            }
        }
    }
}

#[test]
fn monte_carlo_brackets_exact_value() {
    let budget = OracleBudget::default();
    for (n, r) in [(4usize, 1usize), (5, 2), (6, 3)] {
        let mu = Distribution::product(n, &ratio(1, 3)).unwrap();
        let exact = zerorect_core::matcore::rational_to_f64(&covering_probability_exact(&mu, r, &budget).unwrap());
        let est = covering_probability_mc(&mu, r, 20_000, 9).unwrap();
        assert!(est.lower <= exact && exact <= est.upper, "n={n} r={r}: {exact} outside [{}, {}]", est.lower, est.upper);
    }
}

