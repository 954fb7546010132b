//! The three random-integer models over the first `N` primes of a subset `A`.
//!
//! Each prime `p_j` carries an independent exponent with one of three laws:
//!
//! * model 1, `T`: geometric, `P(T = m) = (1 − 1/p) p^{−m}`, `m >= 0`;
//! * model 2, `U`: `T` conditioned on `T < k`, supported on k-free integers;
//! * model 3, `V = min(T, k − 1)`, also k-free.
//!
//! Integers are exponent vectors aligned with `A_N`; the value itself is only
//! rendered on request. Sampling lives in [`sampler`].

pub mod sampler;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow};
use serde::Serialize;

use crate::arith::ExactRational;
use crate::error::{domain, Result};
use crate::primes::{is_prime, PrimeSubset};

pub use sampler::{
    sample, sample_log_bx, sample_log_values, sample_normalized_logs, Samples, DEFAULT_SEED,
};

/// Per-prime exponent distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "k")]
pub enum ExponentLaw {
    Geometric,
    ConditionedBelowK(u32),
    TruncatedAtKMinus1(u32),
}

impl ExponentLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ExponentLaw::Geometric => Ok(()),
            ExponentLaw::ConditionedBelowK(k) | ExponentLaw::TruncatedAtKMinus1(k) if k < 2 => {
                Err(domain!("bounded exponent laws need k >= 2, got {k}"))
            }
            _ => Ok(()),
        }
    }

    /// Law for model id 1, 2 or 3.
    pub fn for_model(model_id: u8, k: Option<u32>) -> Result<Self> {
        let need_k = || k.ok_or_else(|| domain!("model {model_id} needs k"));
        let law = match model_id {
            1 => ExponentLaw::Geometric,
            2 => ExponentLaw::ConditionedBelowK(need_k()?),
            3 => ExponentLaw::TruncatedAtKMinus1(need_k()?),
            _ => return Err(domain!("model id must be 1, 2 or 3, got {model_id}")),
        };
        law.validate()?;
        Ok(law)
    }

    pub fn model_id(&self) -> u8 {
        match self {
            ExponentLaw::Geometric => 1,
            ExponentLaw::ConditionedBelowK(_) => 2,
            ExponentLaw::TruncatedAtKMinus1(_) => 3,
        }
    }

    pub fn k(&self) -> Option<u32> {
        match *self {
            ExponentLaw::Geometric => None,
            ExponentLaw::ConditionedBelowK(k) | ExponentLaw::TruncatedAtKMinus1(k) => Some(k),
        }
    }

    /// Largest exponent in the support, if bounded.
    pub fn max_exponent(&self) -> Option<u32> {
        self.k().map(|k| k - 1)
    }
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn power(p: u64, e: u32) -> BigInt {
    Pow::pow(big(p), e)
}

fn ratio(numer: BigInt, denom: BigInt) -> ExactRational {
    ExactRational::new(numer, denom).expect("nonzero denominator")
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(domain!("{p} is not prime"))
    }
}

fn check_in_support(law: ExponentLaw, m: u32) -> Result<()> {
    law.validate()?;
    match law.max_exponent() {
        Some(top) if m > top => Err(domain!(
            "exponent {m} lies outside the support {{0, …, {top}}} of {law:?}"
        )),
        _ => Ok(()),
    }
}

/// `P(exponent = m)` at prime `p`.
pub fn exponent_pmf(law: ExponentLaw, p: u64, m: u32) -> Result<ExactRational> {
    check_prime(p)?;
    check_in_support(law, m)?;
    Ok(match law {
        ExponentLaw::Geometric => ratio(big(p - 1), power(p, m + 1)),
        ExponentLaw::ConditionedBelowK(k) => {
            ratio(big(p - 1) * power(p, k - 1 - m), power(p, k) - 1)
        }
        ExponentLaw::TruncatedAtKMinus1(k) if m == k - 1 => ratio(BigInt::one(), power(p, m)),
        ExponentLaw::TruncatedAtKMinus1(_) => ratio(big(p - 1), power(p, m + 1)),
    })
}

/// Exact expectation of the exponent at prime `p`.
pub fn exponent_mean(law: ExponentLaw, p: u64) -> Result<ExactRational> {
    check_prime(p)?;
    law.validate()?;
    match law.max_exponent() {
        None => Ok(ratio(BigInt::one(), big(p - 1))),
        Some(top) => (1..=top)
            .map(|m| Ok(exponent_pmf(law, p, m)? * ExactRational::from_integer(m)))
            .sum(),
    }
}

/// Floating-point exponent mean, for long prime lists.
pub fn exponent_mean_f64(law: ExponentLaw, p: u64) -> f64 {
    let x = 1.0 / p as f64;
    match law {
        ExponentLaw::Geometric => 1.0 / (p as f64 - 1.0),
        ExponentLaw::ConditionedBelowK(k) => {
            let norm = 1.0 - x.powi(k as i32);
            (1..k).map(|m| m as f64 * (1.0 - x) * x.powi(m as i32)).sum::<f64>() / norm
        }
        ExponentLaw::TruncatedAtKMinus1(k) => (1..k).map(|m| x.powi(m as i32)).sum(),
    }
}

/// An integer as exponents over `A_N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FactoredInteger {
    pub exponents: Vec<u32>,
}

impl FactoredInteger {
    pub fn new(exponents: Vec<u32>) -> Self {
        FactoredInteger { exponents }
    }

    /// `∏ p_j^{c_j}`.
    pub fn value(&self, primes: &[u64]) -> BigUint {
        primes
            .iter()
            .zip(&self.exponents)
            .map(|(&p, &c)| Pow::pow(BigUint::from(p), c))
            .product()
    }

    /// `Σ c_j log p_j`.
    pub fn log_value(&self, primes: &[u64]) -> f64 {
        primes
            .iter()
            .zip(&self.exponents)
            .filter(|(_, &c)| c > 0)
            .map(|(&p, &c)| c as f64 * (p as f64).ln())
            .sum()
    }
}

/// `I_{N;A,i}`: independent exponents with a common law over `A_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomIntegerModel {
    primes: Vec<u64>,
    theta: f64,
    law: ExponentLaw,
}

impl RandomIntegerModel {
    /// Model over the first `n` primes of `subset`.
    pub fn new(subset: &PrimeSubset, n: usize, law: ExponentLaw) -> Result<Self> {
        law.validate()?;
        if n == 0 {
            return Err(domain!("a model needs at least one prime"));
        }
        let primes = subset.first(n)?.to_vec();
        Ok(RandomIntegerModel { primes, theta: subset.theta(), law })
    }

    /// Model over an explicit prime list with declared density `theta`.
    pub fn from_primes(primes: Vec<u64>, theta: f64, law: ExponentLaw) -> Result<Self> {
        law.validate()?;
        if primes.is_empty() {
            return Err(domain!("a model needs at least one prime"));
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(domain!("{p} is not prime"));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(domain!("theta must lie in (0, 1], got {theta}"));
        }
        Ok(RandomIntegerModel { primes, theta, law })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn n(&self) -> usize {
        self.primes.len()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn law(&self) -> ExponentLaw {
        self.law
    }

    pub fn model_id(&self) -> u8 {
        self.law.model_id()
    }

    fn check_sample(&self, n: &FactoredInteger) -> Result<()> {
        if n.exponents.len() != self.primes.len() {
            return Err(domain!(
                "exponent vector has length {}, model has N = {}",
                n.exponents.len(),
                self.primes.len()
            ));
        }
        Ok(())
    }
}

/// Closed-form `P(I_{N;A,i} = n)`.
///
/// * model 1: `(1/n) ∏ (1 − 1/p)`;
/// * model 2: `(1/n) ∏ (1 + 1/p + … + p^{−(k−1)})^{−1}`;
/// * model 3: `∏ (1 − 1/p) / (n_{(k−1)-free} · φ(n_{(k−1)-power}))`.
pub fn model_pmf(model: &RandomIntegerModel, n: &FactoredInteger) -> Result<ExactRational> {
    model.check_sample(n)?;
    for &c in &n.exponents {
        check_in_support(model.law, c)?;
    }
    // Integer numerator and denominator, reduced once at the end.
    let mut numer = BigInt::one();
    let mut denom = BigInt::one();
    for (&p, &c) in model.primes.iter().zip(&n.exponents) {
        match model.law {
            ExponentLaw::Geometric => {
                numer *= big(p - 1);
                denom *= power(p, c + 1);
            }
            ExponentLaw::ConditionedBelowK(k) => {
                numer *= big(p - 1) * power(p, k - 1);
                denom *= (power(p, k) - 1) * power(p, c);
            }
            ExponentLaw::TruncatedAtKMinus1(k) => {
                let r = k - 1;
                let e = r * (c / r);
                numer *= big(p - 1);
                denom *= power(p, c % r + 1);
                if e > 0 {
                    denom *= power(p, e - 1) * big(p - 1);
                }
            }
        }
    }
    Ok(ratio(numer, denom))
}

/// `E log I = Σ_j E[c_j] log p_j`.
pub fn expected_log(model: &RandomIntegerModel) -> f64 {
    model
        .primes
        .iter()
        .map(|&p| exponent_mean_f64(model.law, p) * (p as f64).ln())
        .sum()
}

/// `log n / E log I`.
pub fn normalized_log(model: &RandomIntegerModel, sample: &FactoredInteger) -> Result<f64> {
    if model.n() == 0 {
        return Err(domain!("normalized log needs N >= 1"));
    }
    model.check_sample(sample)?;
    Ok(sample.log_value(&model.primes) / expected_log(model))
}

/// Bernoulli success probability `q = P(exponent >= 1)`.
pub fn bx_success_probability(law: ExponentLaw, p: u64) -> Result<ExactRational> {
    check_prime(p)?;
    law.validate()?;
    Ok(match law {
        ExponentLaw::Geometric | ExponentLaw::TruncatedAtKMinus1(_) => ratio(BigInt::one(), big(p)),
        ExponentLaw::ConditionedBelowK(k) => ratio(power(p, k - 1) - 1, power(p, k) - 1),
    })
}

/// `P(X = m log p)` for `m >= 1`: the exponent law conditioned on being positive.
pub fn bx_x_pmf(law: ExponentLaw, p: u64, m: u32) -> Result<ExactRational> {
    check_prime(p)?;
    if m == 0 {
        return Err(domain!("X is supported on m >= 1"));
    }
    check_in_support(law, m)?;
    Ok(match law {
        ExponentLaw::Geometric => ratio(big(p - 1), power(p, m)),
        ExponentLaw::ConditionedBelowK(k) => {
            // (1 − 1/p) p^{−(m−1)} / (1 − p^{−(k−1)})
            ratio(big(p - 1) * power(p, k - 1 - m), power(p, k - 1) - 1)
        }
        ExponentLaw::TruncatedAtKMinus1(k) if m == k - 1 => ratio(BigInt::one(), power(p, k - 2)),
        ExponentLaw::TruncatedAtKMinus1(_) => ratio(big(p - 1), power(p, m)),
    })
}

/// `P(B X = m log p)`.
pub fn bx_product_pmf(law: ExponentLaw, p: u64, m: u32) -> Result<ExactRational> {
    let q = bx_success_probability(law, p)?;
    if m == 0 {
        Ok(ExactRational::one() - q)
    } else {
        Ok(q * bx_x_pmf(law, p, m)?)
    }
}

/// `μ = E X`; for the geometric law `p/(p−1) · log p`.
pub fn bx_mean_x(law: ExponentLaw, p: u64) -> Result<f64> {
    let q = bx_success_probability(law, p)?.to_f64();
    Ok(exponent_mean_f64(law, p) / q * (p as f64).ln())
}

/// Per-coordinate B/X parameters of a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BxCoordinate {
    pub p: u64,
    pub q: ExactRational,
    pub mu: f64,
}

/// `log I = Σ B_j X_j` coordinate data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BXDecomposition {
    pub law: ExponentLaw,
    pub coordinates: Vec<BxCoordinate>,
}

pub fn bx_decomposition(model: &RandomIntegerModel) -> Result<BXDecomposition> {
    let coordinates = model
        .primes
        .iter()
        .map(|&p| {
            Ok(BxCoordinate {
                p,
                q: bx_success_probability(model.law, p)?,
                mu: bx_mean_x(model.law, p)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BXDecomposition { law: model.law, coordinates })
}
