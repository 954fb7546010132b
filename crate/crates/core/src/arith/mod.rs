//! Exact integer and rational arithmetic: k-free parts, the Euler totient,
//! smooth-number enumeration, Euler products and restricted harmonic sums.

mod rational;
mod smooth;

pub use rational::{sum_unit_fractions, ExactRational};
pub use smooth::{
    enumerate_smooth, euler_product_full, euler_product_full_f64, euler_product_kfree,
    euler_product_kfree_f64, harmonic_sum_smooth, harmonic_sum_smooth_f64, smooth_sum,
    smooth_term_count, Exactness, HarmonicVariant, Value, AUTO_EXACT_MAX_TERMS,
};

use serde::Serialize;

use crate::error::{domain, Result};

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    // 6k ± 1 wheel
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        for p in [d, d + 2] {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
        }
        d += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// True iff no `p^k` divides `n`.
pub fn is_k_free(n: u64, k: u32) -> Result<bool> {
    if k < 2 {
        return Err(domain!("k-freeness needs k >= 2, got {k}"));
    }
    if n == 0 {
        return Err(domain!("k-freeness is defined for n >= 1"));
    }
    Ok(factorize(n).iter().all(|&(_, e)| e < k))
}

/// `n = free_part · power_part` with `free_part` k-free and `power_part` a k-th power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KDecomposition {
    pub n: u64,
    pub k: u32,
    pub free_part: u64,
    pub power_part: u64,
}

/// Split `n` by the exponent-residue rule: each `p^c` contributes
/// `p^(c mod k)` to the free part and `p^(k·⌊c/k⌋)` to the power part.
/// For `k = 1` the free part is 1.
pub fn k_decompose(n: u64, k: u32) -> Result<KDecomposition> {
    if n == 0 {
        return Err(domain!("k-decomposition is defined for n >= 1"));
    }
    if k == 0 {
        return Err(domain!("k-decomposition needs k >= 1"));
    }
    let mut free_part = 1u64;
    for (p, c) in factorize(n) {
        free_part *= p.pow(c % k);
    }
    Ok(KDecomposition {
        n,
        k,
        free_part,
        power_part: n / free_part,
    })
}

/// Euler's totient `φ(n) = n ∏_{p|n} (1 − 1/p)`.
pub fn totient(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(domain!("totient is defined for n >= 1"));
    }
    Ok(factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1)))
}

/// `φ(0..=limit)` by a linear sieve; entry 0 is 0.
pub fn totient_table(limit: usize) -> Vec<u32> {
    let mut phi = vec![0u32; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    if limit >= 1 {
        phi[1] = 1;
    }
    for i in 2..=limit {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if ip > limit {
                break;
            }
            if i % p as usize == 0 {
                phi[ip] = phi[i] * p;
                break;
            }
            phi[ip] = phi[i] * (p - 1);
        }
    }
    phi
}
