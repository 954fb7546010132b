//! Ratio tables for the restricted Mertens formulas, totient-weighted
//! harmonic sums and the Williams exponent.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::ConvergenceRow;
use crate::arith::{
    euler_product_full, euler_product_full_f64, euler_product_kfree, euler_product_kfree_f64,
    smooth_sum, totient_table, Exactness, HarmonicVariant, Value,
};
use crate::constants::totient_harmonic_constant;
use crate::dickman::mertens_constant;
use crate::error::{domain, Result};
use crate::primes::{sieve_primes, PrimeSubset, SubsetSpec};

/// Which limit theorem a ratio table reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "variant", content = "k", rename_all = "snake_case")]
pub enum MertensVariant {
    /// `Σ 1/n` over all `A`-supported `n` with primes `<= N`, over the same sum cut at `n <= N`.
    Thm1i,
    /// As `Thm1i` with both sums over k-free `n`.
    Thm1ii(u32),
    /// Euler product over the totient-weighted sum of k-free `n <= N`.
    Thm3(u32),
    /// `A = ℙ`: `∏_{p<=N} (1 − 1/p)^{−1} / H_N`.
    ClassicMertens,
}

impl MertensVariant {
    fn denominator(self) -> HarmonicVariant {
        match self {
            MertensVariant::Thm1i | MertensVariant::ClassicMertens => HarmonicVariant::Plain,
            MertensVariant::Thm1ii(k) => HarmonicVariant::KFree(k),
            MertensVariant::Thm3(k) => HarmonicVariant::TotientWeighted(k),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            MertensVariant::Thm1ii(k) | MertensVariant::Thm3(k) if k < 2 => {
                Err(domain!("k must be at least 2, got {k}"))
            }
            _ => Ok(()),
        }
    }
}

/// Where the denominator's bounded sum is cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorCut {
    /// `n <= N`.
    #[default]
    AtN,
    /// `n <= p`, the largest prime of the subset not exceeding `N`.
    AtLargestPrime,
}

fn check_increasing(n_list: &[u64]) -> Result<()> {
    if n_list.is_empty() {
        return Err(domain!("N list is empty"));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain!("N list must be strictly increasing"));
    }
    Ok(())
}

fn numerator(primes: &[u64], variant: MertensVariant, exactness: Exactness) -> Result<Value> {
    let exact = exactness != Exactness::Float;
    Ok(match (variant, exact) {
        (MertensVariant::Thm1ii(k), true) => Value::Exact(euler_product_kfree(primes, k)?),
        (MertensVariant::Thm1ii(k), false) => Value::Float(euler_product_kfree_f64(primes, k)?),
        (_, true) => Value::Exact(euler_product_full(primes)?),
        (_, false) => Value::Float(euler_product_full_f64(primes)?),
    })
}

/// One row per `N`: the infinite `A`-supported sum in closed form over the
/// bounded sum, with target `e^{γθ} Γ(θ+1)`.
///
/// `N` is a magnitude bound: the numerator uses the primes of `A` up to `N`.
/// `ClassicMertens` ignores `subset` and sieves the primes itself.
pub fn mertens_ratio_table(
    subset: &PrimeSubset,
    variant: MertensVariant,
    n_list: &[u64],
    cut: DenominatorCut,
    exactness: Exactness,
) -> Result<Vec<ConvergenceRow>> {
    variant.validate()?;
    check_increasing(n_list)?;
    let max_n = *n_list.last().unwrap();
    let classic;
    let (primes, theta): (&[u64], f64) = if variant == MertensVariant::ClassicMertens {
        classic = sieve_primes(max_n.max(2))?;
        (classic.primes(), 1.0)
    } else {
        if subset.limit() < max_n {
            return Err(domain!(
                "subset is materialized up to {}, below N = {max_n}",
                subset.limit()
            ));
        }
        (subset.primes(), subset.theta())
    };
    let target = mertens_constant(theta)?;
    n_list
        .par_iter()
        .map(|&n| {
            let count = primes.partition_point(|&p| p <= n);
            if count == 0 {
                return Err(domain!("no prime of the subset lies below N = {n}"));
            }
            let used = &primes[..count];
            let bound = match cut {
                DenominatorCut::AtN => n,
                DenominatorCut::AtLargestPrime => used[count - 1],
            };
            let (lhs, rhs) = rayon::join(
                || numerator(used, variant, exactness),
                || smooth_sum(used, bound, variant.denominator(), exactness),
            );
            Ok(ConvergenceRow::new(n, lhs?, rhs?, target))
        })
        .collect()
}

/// Numerator of [`totient_harmonic_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TotientMode {
    /// `Σ'(k)_{n<=N} 1/(n_{(k−1)-free} φ(n_{(k−1)-power}))`, target 1.
    #[default]
    Restricted,
    /// `Σ_{n<=N} 1/φ(n)`, target `ζ(2)ζ(3)/ζ(6)`.
    AllTotient,
}

/// The totient-weighted sum up to `N` divided by `log N`.
pub fn totient_harmonic_ratio(
    n: u64,
    k: u32,
    mode: TotientMode,
    exactness: Exactness,
) -> Result<ConvergenceRow> {
    if n < 10 {
        return Err(domain!("N must be at least 10, got {n}"));
    }
    if k < 2 {
        return Err(domain!("k must be at least 2, got {k}"));
    }
    let log_n = Value::Float((n as f64).ln());
    match mode {
        TotientMode::Restricted => {
            let primes = sieve_primes(n)?;
            let sum = smooth_sum(primes.primes(), n, HarmonicVariant::TotientWeighted(k), exactness)?;
            Ok(ConvergenceRow::new(n, sum, log_n, 1.0))
        }
        TotientMode::AllTotient => {
            let limit = usize::try_from(n).map_err(|_| domain!("N = {n} is too large"))?;
            let phi = totient_table(limit);
            let sum = neumaier(phi[1..].iter().map(|&f| 1.0 / f as f64));
            Ok(ConvergenceRow::new(n, Value::Float(sum), log_n, totient_harmonic_constant()))
        }
    }
}

fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WilliamsPoint {
    pub n: u64,
    pub log_log_n: f64,
    pub log_s: f64,
}

/// Least-squares fit of `log S_N` on `log log N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilliamsFit {
    pub modulus: u64,
    pub residue: u64,
    pub slope: f64,
    /// Encodes the Williams constant; reported, not checked.
    pub intercept: f64,
    pub target: f64,
    pub points: Vec<WilliamsPoint>,
}

/// Fit the exponent of `S_N = ∏_{p<=N, p ≡ j (l)} (1 − 1/p)^{−1} ≍ (log N)^{1/φ(l)}`.
/// `l = 1` means all primes.
pub fn williams_slope(l: u64, j: u64, n_list: &[u64]) -> Result<WilliamsFit> {
    check_increasing(n_list)?;
    if n_list.len() < 3 {
        return Err(domain!("a slope fit needs at least 3 values of N"));
    }
    let (first, last) = (n_list[0], *n_list.last().unwrap());
    if first < 3 || last < first.saturating_mul(100) {
        return Err(domain!("N values must start at 3 or more and span at least two decades"));
    }
    let spec = match l {
        0 => return Err(domain!("modulus must be positive")),
        1 => SubsetSpec::All,
        _ => {
            if j.gcd(&l) != 1 {
                return Err(domain!("gcd({j}, {l}) must be 1"));
            }
            SubsetSpec::Residue { modulus: l, residue: j % l }
        }
    };
    let subset = PrimeSubset::up_to(spec, last)?;
    let target = subset.theta();
    let primes = subset.primes();
    let points: Vec<WilliamsPoint> = n_list
        .iter()
        .map(|&n| {
            let used = &primes[..primes.partition_point(|&p| p <= n)];
            let log_s: f64 = used.iter().map(|&p| -(-1.0 / p as f64).ln_1p()).sum();
            WilliamsPoint { n, log_log_n: (n as f64).ln().ln(), log_s }
        })
        .collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.log_log_n).sum::<f64>() / m;
    let my = points.iter().map(|p| p.log_s).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.log_log_n - mx) * (p.log_s - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.log_log_n - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(WilliamsFit {
        modulus: l,
        residue: if l == 1 { 0 } else { j % l },
        slope,
        intercept: my - slope * mx,
        target,
        points,
    })
}
