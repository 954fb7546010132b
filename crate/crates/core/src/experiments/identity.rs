//! The fixed-`N` totient identity and its corollary.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::ConvergenceRow;
use crate::arith::{euler_product_full, ExactRational, Value};
use crate::constants::EULER_GAMMA;
use crate::error::{domain, Error, Result};
use crate::primes::{is_prime, sieve_primes};

/// Largest `k^N` enumerated by [`identity_check`].
pub const IDENTITY_MAX_TERMS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub primes: Vec<u64>,
    pub k: u32,
    pub terms: u64,
    pub lhs: ExactRational,
    pub rhs: ExactRational,
    pub equal: bool,
}

fn term_count(n: usize, k: u32) -> Option<u64> {
    (k as u64).checked_pow(u32::try_from(n).ok()?)
}

/// Enumerate every k-free `n` supported on `primes` and sum
/// `1/(n_{(k−1)-free} φ(n_{(k−1)-power}))` exactly; compare with
/// `∏ (1 − 1/p)^{−1}`.
pub fn identity_check(primes: &[u64], k: u32) -> Result<IdentityCheck> {
    if k < 2 {
        return Err(domain!("k must be at least 2, got {k}"));
    }
    if primes.is_empty() {
        return Err(domain!("prime list is empty"));
    }
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(domain!("{p} is not prime"));
    }
    let terms = term_count(primes.len(), k)
        .filter(|&t| t <= IDENTITY_MAX_TERMS)
        .ok_or_else(|| {
            Error::Resource(format!(
                "{k}^{} terms exceed the enumeration guard of {IDENTITY_MAX_TERMS}",
                primes.len()
            ))
        })?;

    // Every weight divides L = ∏ p^{k−1}(p−1); the numerator of the sum over
    // L is Σ over exponent vectors of ∏_j L_j / w(p_j, c_j).
    let cofactors: Vec<Vec<BigUint>> = primes
        .iter()
        .map(|&p| {
            let local = BigUint::from(p).pow(k - 1) * BigUint::from(p - 1);
            (0..k)
                .map(|c| {
                    let w = if c == k - 1 {
                        BigUint::from(p).pow(k - 2) * BigUint::from(p - 1)
                    } else {
                        BigUint::from(p).pow(c)
                    };
                    &local / w
                })
                .collect()
        })
        .collect();
    let common: BigUint = primes
        .iter()
        .map(|&p| BigUint::from(p).pow(k - 1) * BigUint::from(p - 1))
        .product();

    fn walk(cofactors: &[Vec<BigUint>], acc: &BigUint, out: &mut BigUint) {
        match cofactors.split_first() {
            None => *out += acc,
            Some((head, rest)) => {
                for f in head {
                    walk(rest, &(acc * f), out);
                }
            }
        }
    }
    let (head, rest) = cofactors.split_first().unwrap();
    let numer = head
        .par_iter()
        .map(|f| {
            let mut out = BigUint::zero();
            walk(rest, f, &mut out);
            out
        })
        .reduce(BigUint::zero, |a, b| a + b);

    let lhs = ExactRational::from(BigRational::new(numer.into(), common.into()));
    let rhs = euler_product_full(primes)?;
    let equal = lhs == rhs;
    Ok(IdentityCheck { primes: primes.to_vec(), k, terms, lhs, rhs, equal })
}

/// Both legs of the fixed-`N` corollary over the primes `p <= N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedNReport {
    pub n: u64,
    pub k: u32,
    /// `∏_{p<=N}(1 − 1/p)^{−1} / log N` against `e^γ`.
    pub asymptotic: ConvergenceRow,
    /// Absent when the enumeration exceeds [`IDENTITY_MAX_TERMS`].
    pub exact: Option<IdentityCheck>,
}

pub fn corollary_fixed_n_check(n: u64, k: u32) -> Result<FixedNReport> {
    if k < 2 {
        return Err(domain!("k must be at least 2, got {k}"));
    }
    if n < 2 {
        return Err(domain!("N must be at least 2, got {n}"));
    }
    let table = sieve_primes(n)?;
    let primes = table.primes();
    let exact = match term_count(primes.len(), k) {
        Some(t) if t <= IDENTITY_MAX_TERMS => Some(identity_check(primes, k)?),
        _ => None,
    };
    let product = match &exact {
        Some(check) => check.rhs.clone(),
        None => euler_product_full(primes)?,
    };
    let asymptotic = ConvergenceRow::new(
        n,
        Value::Exact(product),
        Value::Float((n as f64).ln()),
        EULER_GAMMA.exp(),
    );
    Ok(FixedNReport { n, k, asymptotic, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_examples() {
        let c = identity_check(&[2], 2).unwrap();
        assert_eq!(c.lhs, ExactRational::from_integer(2));
        assert!(c.equal);
        let c = identity_check(&[2, 3], 2).unwrap();
        assert_eq!(c.lhs, ExactRational::from_integer(3));
        assert_eq!(c.rhs, ExactRational::from_integer(3));
        let c = identity_check(&[2, 3, 5, 7, 11], 3).unwrap();
        assert_eq!(c.terms, 243);
        assert!(c.equal);
    }

    #[test]
    fn identity_guard_and_validation() {
        let primes = sieve_primes(100).unwrap();
        assert!(matches!(identity_check(primes.primes(), 2), Err(Error::Resource(_))));
        assert!(identity_check(&[2, 4], 2).is_err());
        assert!(identity_check(&[2], 1).is_err());
        assert!(identity_check(&[], 2).is_err());
    }

    // Direct oracle: the weight of each k-free n by explicit decomposition.
    #[test]
    fn lhs_matches_decomposition_oracle() {
        use crate::arith::{factorize, k_decompose, totient};
        let primes = [2u64, 3, 5];
        for k in 2..=4u32 {
            let mut oracle = ExactRational::zero();
            let mut stack = vec![(1u64, 0usize)];
            while let Some((n, j)) = stack.pop() {
                if j == primes.len() {
                    let d = k_decompose(n, k - 1).unwrap();
                    let w = d.free_part * totient(d.power_part).unwrap();
                    assert!(factorize(n).iter().all(|&(_, c)| c < k));
                    oracle = oracle + ExactRational::new(1, w as i64).unwrap();
                    continue;
                }
                for c in 0..k {
                    stack.push((n * primes[j].pow(c), j + 1));
                }
            }
            assert_eq!(identity_check(&primes, k).unwrap().lhs, oracle);
        }
    }

    #[test]
    fn fixed_n_legs() {
        let r = corollary_fixed_n_check(5, 2).unwrap();
        assert!(r.exact.as_ref().unwrap().equal);
        assert_eq!(r.exact.as_ref().unwrap().primes, vec![2, 3, 5]);
        let r = corollary_fixed_n_check(10, 3).unwrap();
        assert!(r.exact.unwrap().equal);
        let r = corollary_fixed_n_check(100_000, 2).unwrap();
        assert!(r.exact.is_none());
        assert!(r.asymptotic.relative_gap() < 0.05);
    }
}
