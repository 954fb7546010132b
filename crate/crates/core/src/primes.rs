//! Prime generation and prime subsets `A ⊂ ℙ` with a declared natural density.
//!
//! Primes come from a segmented, odd-only sieve of Eratosthenes. Each segment is
//! a bitset over `SEGMENT_BITS` consecutive odd numbers, so memory stays bounded
//! by the output vector even for limits near 10^8.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{domain, Error, Result};

const SEGMENT_BITS: usize = 1 << 18;

/// All primes up to a limit, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of primes `<= n`; `n` may not exceed the table limit.
    pub fn count_up_to(&self, n: u64) -> Result<usize> {
        if n > self.limit {
            return Err(Error::Range(format!(
                "{n} exceeds the sieve limit {}",
                self.limit
            )));
        }
        Ok(self.primes.partition_point(|&p| p <= n))
    }

    /// Membership test for `n <= limit`.
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

/// Sieve all primes `<= limit`.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(domain!("sieve limit must be at least 2, got {limit}"));
    }
    let mut primes = vec![2u64];
    if limit >= 3 {
        let root = integer_sqrt(limit);
        // base odd primes up to sqrt(limit), by a plain sieve
        let base: Vec<u64> = {
            let r = root as usize;
            let mut composite = vec![false; r + 1];
            let mut out = Vec::new();
            let mut i = 3;
            while i <= r {
                if !composite[i] {
                    out.push(i as u64);
                    let mut j = i * i;
                    while j <= r {
                        composite[j] = true;
                        j += 2 * i;
                    }
                }
                i += 2;
            }
            out
        };

        // odd n is stored at bit (n - 1) / 2 - offset
        let total_odd = ((limit - 1) / 2) as usize; // odd numbers 3..=limit
        let mut bits = vec![0u64; SEGMENT_BITS / 64];
        let mut seg_start = 0usize;
        while seg_start < total_odd {
            let seg_len = SEGMENT_BITS.min(total_odd - seg_start);
            bits.iter_mut().for_each(|w| *w = 0);
            // bit i of this segment represents 2 * (seg_start + i) + 3
            let lo = 2 * seg_start as u64 + 3;
            let hi = lo + 2 * (seg_len as u64 - 1);
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let mut first = (p * p).max(lo.div_ceil(p) * p);
                if first % 2 == 0 {
                    first += p;
                }
                let mut idx = ((first - lo) / 2) as usize;
                while idx < seg_len {
                    bits[idx / 64] |= 1 << (idx % 64);
                    idx += p as usize;
                }
            }
            for idx in 0..seg_len {
                if bits[idx / 64] & (1 << (idx % 64)) == 0 {
                    primes.push(lo + 2 * idx as u64);
                }
            }
            seg_start += seg_len;
        }
    }
    Ok(PrimeTable { limit, primes })
}

/// Deterministic primality by trial division; used for validating caller input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Euler totient of a small modulus, by direct factorization.
pub(crate) fn totient_u64(n: u64) -> u64 {
    let mut n_rem = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n_rem {
        if n_rem.is_multiple_of(p) {
            while n_rem.is_multiple_of(p) {
                n_rem /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n_rem > 1 {
        result -= result / n_rem;
    }
    result
}

/// Which primes belong to a subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsetSpec {
    All,
    /// Primes `p ≡ residue (mod modulus)`.
    Residue { modulus: u64, residue: u64 },
    /// A caller-supplied list with a caller-declared density. Theorem checks on
    /// such a subset are only as valid as the declared density.
    Explicit { primes: Vec<u64>, theta: f64 },
}

impl SubsetSpec {
    fn admits(&self, p: u64) -> bool {
        match self {
            SubsetSpec::All => true,
            SubsetSpec::Residue { modulus, residue } => p % modulus == *residue,
            SubsetSpec::Explicit { .. } => unreachable!("explicit subsets are not filters"),
        }
    }

    /// Declared natural density of the subset within the primes.
    pub fn theta(&self) -> Result<f64> {
        match self {
            SubsetSpec::All => Ok(1.0),
            SubsetSpec::Residue { modulus, residue } => {
                check_residue(*modulus, *residue)?;
                Ok(1.0 / totient_u64(*modulus) as f64)
            }
            SubsetSpec::Explicit { theta, .. } => {
                if *theta > 0.0 && *theta <= 1.0 {
                    Ok(*theta)
                } else {
                    Err(domain!("declared density {theta} is outside (0, 1]"))
                }
            }
        }
    }
}

fn check_residue(modulus: u64, residue: u64) -> Result<()> {
    if modulus < 2 || residue == 0 || residue >= modulus {
        return Err(domain!(
            "residue class needs 1 <= j < l, got j = {residue}, l = {modulus}"
        ));
    }
    if residue.gcd(&modulus) != 1 {
        return Err(domain!(
            "gcd({residue}, {modulus}) != 1: the class contains at most one prime"
        ));
    }
    Ok(())
}

/// An ordered, materialized prime subset `p_{1;A} < p_{2;A} < …` together with
/// the sieve limit it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeSubset {
    spec: SubsetSpec,
    primes: Vec<u64>,
    theta: f64,
    limit: u64,
}

/// Materialize the subsequence of `table` selected by `spec`.
pub fn build_subset(table: &PrimeTable, spec: SubsetSpec) -> Result<PrimeSubset> {
    let theta = spec.theta()?;
    let primes = match &spec {
        SubsetSpec::Explicit { primes, .. } => {
            let mut sorted = primes.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(domain!("explicit subset contains duplicates"));
            }
            if let Some(&bad) = sorted.iter().find(|&&p| !is_prime(p)) {
                return Err(domain!("explicit subset entry {bad} is not prime"));
            }
            sorted.retain(|&p| p <= table.limit());
            sorted
        }
        _ => table
            .primes()
            .iter()
            .copied()
            .filter(|&p| spec.admits(p))
            .collect(),
    };
    Ok(PrimeSubset {
        spec,
        primes,
        theta,
        limit: table.limit(),
    })
}

impl PrimeSubset {
    /// Sieve far enough that the subset holds at least `count` primes.
    pub fn with_at_least(spec: SubsetSpec, count: usize) -> Result<PrimeSubset> {
        let theta = spec.theta()?;
        if let SubsetSpec::Explicit { primes, .. } = &spec {
            let max = primes.iter().copied().max().unwrap_or(2).max(2);
            let subset = build_subset(&sieve_primes(max)?, spec)?;
            return if subset.len() >= count {
                Ok(subset)
            } else {
                Err(Error::Range(format!(
                    "explicit subset has {} primes, {count} requested",
                    subset.len()
                )))
            };
        }
        // p_n < n (ln n + ln ln n) for n >= 6; divide by theta for a subset
        let n = (count.max(6)) as f64;
        let mut limit = ((n * (n.ln() + n.ln().ln()) / theta) * 1.2).max(100.0) as u64;
        loop {
            let subset = build_subset(&sieve_primes(limit)?, spec.clone())?;
            if subset.len() >= count {
                return Ok(subset);
            }
            limit *= 2;
        }
    }

    /// Sieve to `limit` and select.
    pub fn up_to(spec: SubsetSpec, limit: u64) -> Result<PrimeSubset> {
        build_subset(&sieve_primes(limit.max(2))?, spec)
    }

    pub fn spec(&self) -> &SubsetSpec {
        &self.spec
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The sieve limit backing this subset.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `p_{j;A}`, 1-based.
    pub fn nth_prime(&self, j: usize) -> Result<u64> {
        if j == 0 {
            return Err(Error::Range("prime indices are 1-based".into()));
        }
        self.primes.get(j - 1).copied().ok_or_else(|| {
            Error::Range(format!(
                "index {j} exceeds the {} materialized primes",
                self.primes.len()
            ))
        })
    }

    /// `A_N = {p_{1;A}, …, p_{N;A}}`.
    pub fn first(&self, n: usize) -> Result<&[u64]> {
        if n > self.primes.len() {
            return Err(Error::Range(format!(
                "{n} primes requested, {} materialized",
                self.primes.len()
            )));
        }
        Ok(&self.primes[..n])
    }

    /// Elements `<= bound`; `bound` may not exceed the sieve limit.
    pub fn up_to_bound(&self, bound: u64) -> Result<&[u64]> {
        if bound > self.limit {
            return Err(Error::Range(format!(
                "bound {bound} exceeds the sieve limit {}",
                self.limit
            )));
        }
        Ok(&self.primes[..self.primes.partition_point(|&p| p <= bound)])
    }
}

/// `|A ∩ [N]| / |ℙ ∩ [N]|`.
pub fn empirical_density(subset: &PrimeSubset, n: u64) -> Result<f64> {
    if n > subset.limit() {
        return Err(Error::Range(format!(
            "N = {n} exceeds the sieve limit {}",
            subset.limit()
        )));
    }
    if n < 2 {
        return Err(domain!("no primes <= {n}"));
    }
    let in_subset = subset.up_to_bound(n)?.len();
    let all = sieve_primes(n)?.len();
    Ok(in_subset as f64 / all as f64)
}
