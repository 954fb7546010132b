use std::borrow::Cow;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;

use super::rational::{product_tree, sum_unit_fractions, ExactRational};
use crate::error::{domain, Result};
use crate::primes::is_prime;

/// Above this many terms, [`Exactness::Auto`] switches to floating point.
pub const AUTO_EXACT_MAX_TERMS: usize = 100_000;

/// Weighting of a restricted harmonic sum over `A`-supported integers `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "variant", content = "k", rename_all = "snake_case")]
pub enum HarmonicVariant {
    /// `Σ 1/n`
    Plain,
    /// `Σ' 1/n` over k-free `n`
    KFree(u32),
    /// `Σ' 1/(n_{(k−1)-free} · φ(n_{(k−1)-power}))` over k-free `n`
    TotientWeighted(u32),
}

impl HarmonicVariant {
    fn validate(self) -> Result<()> {
        match self {
            HarmonicVariant::Plain => Ok(()),
            HarmonicVariant::KFree(k) | HarmonicVariant::TotientWeighted(k) if k < 2 => {
                Err(domain!("k-restricted sums need k >= 2, got {k}"))
            }
            _ => Ok(()),
        }
    }

    fn max_exponent(self) -> u32 {
        match self {
            HarmonicVariant::Plain => u32::MAX,
            HarmonicVariant::KFree(k) | HarmonicVariant::TotientWeighted(k) => k - 1,
        }
    }

    /// Multiplicative weight contributed by `p^c` (the summand is `1/weight`).
    fn prime_power_weight(self, p: u64, c: u32) -> u64 {
        match self {
            HarmonicVariant::TotientWeighted(k) if c == k - 1 => p.pow(k - 2) * (p - 1),
            _ => p.pow(c),
        }
    }
}

/// How a bounded sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exactness {
    Exact,
    Float,
    /// Exact up to [`AUTO_EXACT_MAX_TERMS`] terms, floating above.
    #[default]
    Auto,
}

/// A quantity evaluated either exactly or in floating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Exact(ExactRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64(),
            Value::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

fn sorted_primes(primes: &[u64]) -> Result<Cow<'_, [u64]>> {
    if primes.iter().any(|&p| p < 2) {
        return Err(domain!("prime list contains an entry below 2"));
    }
    let primes: Cow<'_, [u64]> = if primes.windows(2).all(|w| w[0] < w[1]) {
        Cow::Borrowed(primes)
    } else {
        let mut v = primes.to_vec();
        v.sort_unstable();
        Cow::Owned(v)
    };
    if primes.windows(2).any(|w| w[0] == w[1]) {
        return Err(domain!("prime list contains duplicates"));
    }
    Ok(primes)
}

fn checked_primes(primes: &[u64]) -> Result<Cow<'_, [u64]>> {
    if primes.is_empty() {
        return Err(domain!("Euler product over an empty prime list"));
    }
    let primes = sorted_primes(primes)?;
    if let Some(&bad) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(domain!("{bad} is not prime"));
    }
    Ok(primes)
}

/// Depth-first walk over exponent vectors; the partial product is cut off
/// as soon as it would exceed `bound`. Visits `(n, weight(n))`.
fn walk<F: FnMut(u64, u64)>(
    primes: &[u64],
    bound: u64,
    variant: HarmonicVariant,
    n: u64,
    weight: u64,
    visit: &mut F,
) {
    visit(n, weight);
    let max_exp = variant.max_exponent();
    for (i, &p) in primes.iter().enumerate() {
        if n > bound / p {
            break;
        }
        let mut m = n * p;
        let mut c = 1;
        loop {
            let w = weight * variant.prime_power_weight(p, c);
            walk(&primes[i + 1..], bound, variant, m, w, visit);
            if c >= max_exp || m > bound / p {
                break;
            }
            m *= p;
            c += 1;
        }
    }
}

fn for_each_smooth<F: FnMut(u64, u64)>(
    primes: &[u64],
    bound: u64,
    variant: HarmonicVariant,
    mut visit: F,
) -> Result<()> {
    if bound == 0 {
        return Err(domain!("smooth enumeration bound must be >= 1"));
    }
    variant.validate()?;
    let primes = sorted_primes(primes)?;
    walk(&primes, bound, variant, 1, 1, &mut visit);
    Ok(())
}

/// Every `n <= bound` whose prime factors all lie in `primes`, ascending; with
/// `k_restrict = Some(k)` only the k-free ones. 1 is always included.
pub fn enumerate_smooth(primes: &[u64], bound: u64, k_restrict: Option<u32>) -> Result<Vec<u64>> {
    let variant = match k_restrict {
        None => HarmonicVariant::Plain,
        Some(k) => HarmonicVariant::KFree(k),
    };
    let mut out = Vec::new();
    for_each_smooth(primes, bound, variant, |n, _| out.push(n))?;
    out.sort_unstable();
    Ok(out)
}

/// Number of summands of the bounded sum.
pub fn smooth_term_count(primes: &[u64], bound: u64, variant: HarmonicVariant) -> Result<usize> {
    let mut count = 0usize;
    for_each_smooth(primes, bound, variant, |_, _| count += 1)?;
    Ok(count)
}

/// Exact restricted harmonic sum over `n <= bound` supported on `primes`.
pub fn harmonic_sum_smooth(
    primes: &[u64],
    bound: u64,
    variant: HarmonicVariant,
) -> Result<ExactRational> {
    let mut weights = Vec::new();
    for_each_smooth(primes, bound, variant, |_, w| weights.push(w))?;
    sum_unit_fractions(&weights)
}

/// Floating-point version of [`harmonic_sum_smooth`] with Neumaier compensation.
pub fn harmonic_sum_smooth_f64(primes: &[u64], bound: u64, variant: HarmonicVariant) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for_each_smooth(primes, bound, variant, |_, w| {
        let x = 1.0 / w as f64;
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    })?;
    Ok(sum + comp)
}

/// Bounded restricted harmonic sum in the requested exactness mode.
pub fn smooth_sum(
    primes: &[u64],
    bound: u64,
    variant: HarmonicVariant,
    exactness: Exactness,
) -> Result<Value> {
    let exact = match exactness {
        Exactness::Exact => true,
        Exactness::Float => false,
        Exactness::Auto => smooth_term_count(primes, bound, variant)? <= AUTO_EXACT_MAX_TERMS,
    };
    if exact {
        harmonic_sum_smooth(primes, bound, variant).map(Value::Exact)
    } else {
        harmonic_sum_smooth_f64(primes, bound, variant).map(Value::Float)
    }
}

fn ratio_of_products(numer: Vec<BigUint>, denom: Vec<BigUint>) -> ExactRational {
    let (n, d) = rayon::join(|| product_tree(&numer), || product_tree(&denom));
    ExactRational::from(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// `∏ (1 − 1/p)^{-1}` over distinct primes, exactly.
pub fn euler_product_full(primes: &[u64]) -> Result<ExactRational> {
    let primes = checked_primes(primes)?;
    let numer = primes.iter().map(|&p| BigUint::from(p)).collect();
    let denom = primes.iter().map(|&p| BigUint::from(p - 1)).collect();
    Ok(ratio_of_products(numer, denom))
}

/// `∏ (1 + 1/p + … + 1/p^{k−1})` over distinct primes, exactly; this is the
/// sum of `1/n` over k-free `n` supported on `primes`.
pub fn euler_product_kfree(primes: &[u64], k: u32) -> Result<ExactRational> {
    if k < 2 {
        return Err(domain!("k-free Euler product needs k >= 2, got {k}"));
    }
    let primes = checked_primes(primes)?;
    // 1 + 1/p + … + p^{1−k} = (p^k − 1) / ((p − 1) p^{k−1})
    let numer = primes
        .iter()
        .map(|&p| BigUint::from(p).pow(k) - 1u32)
        .collect();
    let denom = primes
        .iter()
        .map(|&p| BigUint::from(p - 1) * BigUint::from(p).pow(k - 1))
        .collect();
    Ok(ratio_of_products(numer, denom))
}

pub fn euler_product_full_f64(primes: &[u64]) -> Result<f64> {
    let primes = checked_primes(primes)?;
    let log: f64 = primes.iter().map(|&p| -(-1.0 / p as f64).ln_1p()).sum();
    Ok(log.exp())
}

pub fn euler_product_kfree_f64(primes: &[u64], k: u32) -> Result<f64> {
    if k < 2 {
        return Err(domain!("k-free Euler product needs k >= 2, got {k}"));
    }
    let primes = checked_primes(primes)?;
    let log: f64 = primes
        .iter()
        .map(|&p| {
            let q = 1.0 / p as f64;
            (-q.powi(k as i32)).ln_1p() - (-q).ln_1p()
        })
        .sum();
    Ok(log.exp())
}
