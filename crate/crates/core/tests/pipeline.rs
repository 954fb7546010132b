//! Cross-module checks through the public API.

use dickman_lab::arith::{
    harmonic_sum_smooth, is_k_free, k_decompose, totient, ExactRational, Exactness, HarmonicVariant,
};
use dickman_lab::dickman::{mertens_constant, solve_rho};
use dickman_lab::experiments::{identity_check, ks_test, mertens_ratio_table, DenominatorCut, MertensVariant};
use dickman_lab::models::{
    expected_log, model_pmf, sample, sample_normalized_logs, ExponentLaw, FactoredInteger,
    RandomIntegerModel,
};
use dickman_lab::primes::{PrimeSubset, SubsetSpec};
use proptest::prelude::*;

/// Brute-force sum over k-free n <= bound with prime factors in `primes` of
/// 1/(n_{(k-1)-free} * phi(n_{(k-1)-power})).
fn brute_totient_sum(primes: &[u64], bound: u64, k: u32) -> ExactRational {
    (1..=bound)
        .filter(|&n| {
            let mut m = n;
            for &p in primes {
                while m % p == 0 {
                    m /= p;
                }
            }
            m == 1
        })
        .filter_map(|n| {
            if !is_k_free(n, k).unwrap() {
                return None;
            }
            let d = k_decompose(n, k - 1).ok()?;
            let denom = d.free_part * totient(d.power_part).unwrap();
            Some(ExactRational::new(1, denom as i64).unwrap())
        })
        .sum()
}

#[test]
fn identity_is_limit_of_bounded_sums() {
    // Every cube-free {2,3,5}-smooth n divides 900, so the bounded sum is
    // complete from there on.
    let primes = [2u64, 3, 5];
    let check = identity_check(&primes, 3).unwrap();
    let partial = harmonic_sum_smooth(&primes, 100, HarmonicVariant::TotientWeighted(3)).unwrap();
    let complete = harmonic_sum_smooth(&primes, 900, HarmonicVariant::TotientWeighted(3)).unwrap();
    assert!(check.equal);
    assert!(partial.to_f64() < check.rhs.to_f64());
    assert_eq!(complete, check.rhs);
}

#[test]
fn totient_sum_matches_brute_force() {
    for k in [2, 3] {
        let fast = harmonic_sum_smooth(&[2, 3, 7], 400, HarmonicVariant::TotientWeighted(k)).unwrap();
        assert_eq!(fast, brute_totient_sum(&[2, 3, 7], 400, k));
    }
}

#[test]
fn ratio_table_targets_the_mertens_constant() {
    let subset = PrimeSubset::up_to(SubsetSpec::Residue { modulus: 3, residue: 1 }, 10_000).unwrap();
    let rows = mertens_ratio_table(
        &subset,
        MertensVariant::Thm1ii(2),
        &[1_000, 10_000],
        DenominatorCut::AtN,
        Exactness::Float,
    )
    .unwrap();
    for row in &rows {
        assert!((row.target - mertens_constant(0.5).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn sampled_support_has_positive_mass() {
    let all = PrimeSubset::with_at_least(SubsetSpec::All, 6).unwrap();
    for law in [ExponentLaw::Geometric, ExponentLaw::ConditionedBelowK(3), ExponentLaw::TruncatedAtKMinus1(2)] {
        let model = RandomIntegerModel::new(&all, 6, law).unwrap();
        for draw in sample(&model, 11, 200).unwrap() {
            assert!(!model_pmf(&model, &draw).unwrap().is_zero());
        }
    }
}

#[test]
fn ks_report_matches_manual_statistic() {
    let all = PrimeSubset::with_at_least(SubsetSpec::All, 300).unwrap();
    let model = RandomIntegerModel::new(&all, 300, ExponentLaw::Geometric).unwrap();
    let sol = solve_rho(1.0, 20.0, 1e-3).unwrap();
    let report = ks_test(&model, &sol, 2000, 5).unwrap();
    let mut values = sample_normalized_logs(&model, 5, 2000).unwrap();
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let manual = values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = sol.cdf_clamped(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    assert_eq!(report.ks_statistic, manual);
    assert!(expected_log(&model) > 0.0);
}

proptest! {
    #[test]
    fn k_decomposition_reassembles(n in 1u64..200_000, k in 2u32..6) {
        let d = k_decompose(n, k).unwrap();
        prop_assert_eq!(d.free_part * d.power_part, n);
    }

    #[test]
    fn pmf_of_single_prime_matches_geometric(p_idx in 0usize..6, m in 0u32..30) {
        let primes = [2u64, 3, 5, 7, 11, 13];
        let p = primes[p_idx];
        let model = RandomIntegerModel::from_primes(vec![p], 1.0, ExponentLaw::Geometric).unwrap();
        let got = model_pmf(&model, &FactoredInteger::new(vec![m])).unwrap();
        let want = ExactRational::new(p as i64 - 1, p as i64).unwrap()
            * ExactRational::new(1, p as i64).unwrap().pow(m as i32);
        prop_assert_eq!(got, want);
    }
}
