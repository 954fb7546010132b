//! Engineering tolerances for every pass/fail check.
//!
//! Convergence in all of the limit theorems is `O(1/log N)`, so the bands are
//! wide at desk-scale `N`. They are collected here so a failing check can be
//! traced to one number.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub name: &'static str,
    /// Relative tolerance for ratios, absolute for KS statistics and slopes.
    pub tolerance: f64,
    pub description: &'static str,
}

pub const CLASSIC_MERTENS: Band = Band {
    name: "classic_mertens",
    tolerance: 0.05,
    description: "Euler product over p <= N divided by H_N, relative to e^gamma, at N = 10^5",
};

pub const RESTRICTED_MERTENS: Band = Band {
    name: "restricted_mertens",
    tolerance: 0.15,
    description: "subset Euler product over the bounded subset-smooth sum, relative to e^(gamma theta) Gamma(theta+1)",
};

pub const TOTIENT_RATIO: Band = Band {
    name: "totient_ratio",
    tolerance: 0.10,
    description: "totient-weighted harmonic sums over log N, relative to their limits, at N = 10^6",
};

pub const FIXED_N_ASYMPTOTIC: Band = Band {
    name: "fixed_n_asymptotic",
    tolerance: 0.05,
    description: "prod_{p <= N} (1 - 1/p)^-1 / log N relative to e^gamma, at N >= 10^5",
};

pub const KS_MODEL_1: Band = Band {
    name: "ks_model_1",
    tolerance: 0.05,
    description: "KS distance of normalized log I_1 to D_theta/theta, N = 10^4 primes, 10^4 samples",
};

pub const KS_MODEL_3: Band = Band {
    name: "ks_model_3",
    tolerance: 0.07,
    description: "KS distance of normalized log I_3 (k = 2) to D_theta/theta, N = 10^4 primes, 10^4 samples",
};

pub const WILLIAMS_SLOPE: Band = Band {
    name: "williams_slope",
    tolerance: 0.10,
    description: "least-squares slope of log S_N against log log N, absolute distance to 1/phi(l)",
};

/// Smallest `N` at which each band is judged; below it results are reported only.
pub const KS_MIN_PRIMES: usize = 10_000;
pub const TOTIENT_MIN_N: u64 = 1_000_000;
pub const FIXED_N_MIN_N: u64 = 100_000;
pub const CLASSIC_MIN_N: u64 = 100_000;
pub const RESTRICTED_MIN_N: u64 = 1_000_000;

pub const ALL: [Band; 7] = [
    CLASSIC_MERTENS,
    RESTRICTED_MERTENS,
    TOTIENT_RATIO,
    FIXED_N_ASYMPTOTIC,
    KS_MODEL_1,
    KS_MODEL_3,
    WILLIAMS_SLOPE,
];
