//! Kolmogorov–Smirnov distance of normalized `log I` to `D_θ / θ`.

use serde::Serialize;

use crate::dickman::DickmanSolution;
use crate::error::{domain, Result};
use crate::models::{sample_normalized_logs, RandomIntegerModel};

pub const KS_MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsReport {
    pub model_id: u8,
    pub theta: f64,
    pub n: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub ks_statistic: f64,
}

/// Two-sided `sup |F_n − F|` for a sample against a continuous-at-the-jumps
/// reference CDF. Sorts `values` in place.
pub fn ks_statistic(values: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// KS distance between `count` normalized-log draws and `x ↦ P(D_θ <= θ x)`.
pub fn ks_test(
    model: &RandomIntegerModel,
    sol: &DickmanSolution,
    count: usize,
    seed: u64,
) -> Result<KsReport> {
    let theta = model.theta();
    if (sol.theta() - theta).abs() > 1e-12 {
        return Err(domain!(
            "Dickman solution has theta = {}, model has theta = {theta}",
            sol.theta()
        ));
    }
    if count < KS_MIN_SAMPLES {
        return Err(domain!("KS test needs at least {KS_MIN_SAMPLES} samples, got {count}"));
    }
    let mut values = sample_normalized_logs(model, seed, count)?;
    let ks_statistic = ks_statistic(&mut values, |x| sol.cdf_clamped(theta * x));
    Ok(KsReport {
        model_id: model.model_id(),
        theta,
        n: model.n(),
        sample_count: count,
        seed,
        ks_statistic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dickman::solve_rho;
    use crate::models::ExponentLaw;
    use crate::primes::{PrimeSubset, SubsetSpec};

    #[test]
    fn statistic_of_uniform_grid() {
        // midpoints of n cells against U(0,1): D = 1/(2n)
        let mut v: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_statistic(&mut v, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
        // an atom at 0 against a continuous law counts fully
        let mut v = vec![0.0; 10];
        assert!((ks_statistic(&mut v, |x| x.clamp(0.0, 1.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatch_and_small_samples() {
        let all = PrimeSubset::with_at_least(SubsetSpec::All, 10).unwrap();
        let m = RandomIntegerModel::new(&all, 10, ExponentLaw::Geometric).unwrap();
        let half = solve_rho(0.5, 10.0, 1e-2).unwrap();
        let one = solve_rho(1.0, 10.0, 1e-2).unwrap();
        assert!(ks_test(&m, &half, 1000, 1).is_err());
        assert!(ks_test(&m, &one, 999, 1).is_err());
        let r = ks_test(&m, &one, 1000, 1).unwrap();
        assert_eq!((r.model_id, r.n, r.sample_count, r.seed), (1, 10, 1000, 1));
        assert!((0.0..=1.0).contains(&r.ks_statistic));
    }
}
