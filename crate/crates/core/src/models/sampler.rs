//! Seeded samplers.
//!
//! Draw `i` reads ChaCha8 stream `i` from word 0; coordinate `j` consumes the
//! `j`-th 64-bit output (two for the B/X sampler). Every exponent is therefore
//! a pure function of `(seed, i, j)` and draws can be generated in parallel.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use super::{
    bx_success_probability, bx_x_pmf, exponent_pmf, expected_log, ExponentLaw, FactoredInteger,
    RandomIntegerModel,
};
use crate::error::{domain, Result};

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 1729;

/// Streams at or above this offset belong to the B/X sampler.
const BX_STREAM: u64 = 1 << 63;

/// Uniform on `(0, 1]` from the top 53 bits.
fn unit(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Inverse-CDF draw of a nonnegative integer from its survival function:
/// the largest `m` with `u <= P(M >= m)`.
#[derive(Debug, Clone)]
enum Inverse {
    /// `P(M >= m) = p^{−m}` shifted by `offset`, optionally capped.
    Geometric { inv_p: f64, ln_p: f64, offset: u32, cap: u32 },
    /// `survival[m − 1] = P(M >= m)`, tabulated exactly then rounded.
    Table { survival: Vec<f64> },
}

impl Inverse {
    fn draw(&self, u: f64) -> u32 {
        match self {
            Inverse::Geometric { inv_p, ln_p, offset, cap } => {
                let g = if u > *inv_p { 0 } else { (-u.ln() / ln_p).floor() as u32 };
                (offset + g).min(*cap)
            }
            Inverse::Table { survival } => survival.iter().take_while(|&&s| u <= s).count() as u32,
        }
    }
}

/// Survival table `P(M >= m)`, `m = 1..=top`, from an exact pmf on `0..=top`.
fn survival_table(pmf: impl Fn(u32) -> Result<f64>, top: u32) -> Result<Vec<f64>> {
    let mut tail = 0.0;
    let mut out = vec![0.0; top as usize];
    for m in (1..=top).rev() {
        tail += pmf(m)?;
        out[m as usize - 1] = tail;
    }
    Ok(out)
}

fn exponent_inverse(law: ExponentLaw, p: u64) -> Result<Inverse> {
    let inv_p = 1.0 / p as f64;
    let ln_p = (p as f64).ln();
    Ok(match law {
        ExponentLaw::Geometric => Inverse::Geometric { inv_p, ln_p, offset: 0, cap: u32::MAX },
        ExponentLaw::ConditionedBelowK(k) | ExponentLaw::TruncatedAtKMinus1(k) => Inverse::Table {
            survival: survival_table(|m| Ok(exponent_pmf(law, p, m)?.to_f64()), k - 1)?,
        },
    })
}

fn x_inverse(law: ExponentLaw, p: u64) -> Result<Inverse> {
    let inv_p = 1.0 / p as f64;
    let ln_p = (p as f64).ln();
    Ok(match law {
        ExponentLaw::Geometric => Inverse::Geometric { inv_p, ln_p, offset: 1, cap: u32::MAX },
        ExponentLaw::ConditionedBelowK(k) | ExponentLaw::TruncatedAtKMinus1(k) => {
            // X >= 1 always; the table covers m = 1..=k−1
            let mut survival = survival_table(|m| Ok(bx_x_pmf(law, p, m)?.to_f64()), k - 1)?;
            survival[0] = 1.0;
            Inverse::Table { survival }
        }
    })
}

/// Per-prime inverse CDFs for one model.
#[derive(Debug, Clone)]
struct Coordinates {
    log_p: Vec<f64>,
    exponent: Vec<Inverse>,
}

impl Coordinates {
    fn new(model: &RandomIntegerModel) -> Result<Self> {
        let exponent = model
            .primes()
            .iter()
            .map(|&p| exponent_inverse(model.law(), p))
            .collect::<Result<_>>()?;
        let log_p = model.primes().iter().map(|&p| (p as f64).ln()).collect();
        Ok(Coordinates { log_p, exponent })
    }

    fn exponents(&self, seed: u64, i: u64) -> Vec<u32> {
        let mut rng = rng_for(seed, i);
        self.exponent.iter().map(|inv| inv.draw(unit(rng.next_u64()))).collect()
    }

    fn log_value(&self, seed: u64, i: u64) -> f64 {
        let mut rng = rng_for(seed, i);
        let mut acc = 0.0;
        for (inv, lp) in self.exponent.iter().zip(&self.log_p) {
            let c = inv.draw(unit(rng.next_u64()));
            if c > 0 {
                acc += c as f64 * lp;
            }
        }
        acc
    }
}

/// Lazy stream of exponent vectors; see [`sample`].
#[derive(Debug, Clone)]
pub struct Samples {
    coords: Coordinates,
    seed: u64,
    next: u64,
    count: u64,
}

impl Iterator for Samples {
    type Item = FactoredInteger;

    fn next(&mut self) -> Option<FactoredInteger> {
        if self.next >= self.count {
            return None;
        }
        let out = FactoredInteger::new(self.coords.exponents(self.seed, self.next));
        self.next += 1;
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Samples {}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        Err(domain!("sample count must be positive"))
    } else {
        Ok(())
    }
}

/// `count` independent draws of the model as exponent vectors.
pub fn sample(model: &RandomIntegerModel, seed: u64, count: usize) -> Result<Samples> {
    check_count(count)?;
    Ok(Samples {
        coords: Coordinates::new(model)?,
        seed,
        next: 0,
        count: count as u64,
    })
}

/// `log I` for draws `0..count`, the same draws as [`sample`], computed in parallel.
pub fn sample_log_values(model: &RandomIntegerModel, seed: u64, count: usize) -> Result<Vec<f64>> {
    check_count(count)?;
    let coords = Coordinates::new(model)?;
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| coords.log_value(seed, i))
        .collect())
}

/// `log I / E log I` for draws `0..count`.
pub fn sample_normalized_logs(model: &RandomIntegerModel, seed: u64, count: usize) -> Result<Vec<f64>> {
    let mean = expected_log(model);
    if !(mean > 0.0) {
        return Err(domain!("expected log is zero"));
    }
    let mut values = sample_log_values(model, seed, count)?;
    values.iter_mut().for_each(|v| *v /= mean);
    Ok(values)
}

/// Draws of `Σ_j B_j X_j` with `B_j ~ Bernoulli(q_j)` independent of `X_j`.
pub fn sample_log_bx(model: &RandomIntegerModel, seed: u64, count: usize) -> Result<Vec<f64>> {
    check_count(count)?;
    let law = model.law();
    let coords = model
        .primes()
        .iter()
        .map(|&p| {
            Ok((
                bx_success_probability(law, p)?.to_f64(),
                x_inverse(law, p)?,
                (p as f64).ln(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, BX_STREAM | i);
            let mut acc = 0.0;
            for (q, x, lp) in &coords {
                let b = unit(rng.next_u64());
                let u = unit(rng.next_u64());
                if b <= *q {
                    acc += x.draw(u) as f64 * lp;
                }
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{bx_product_pmf, RandomIntegerModel};

    fn model(primes: &[u64], law: ExponentLaw) -> RandomIntegerModel {
        RandomIntegerModel::from_primes(primes.to_vec(), 1.0, law).unwrap()
    }

    #[test]
    fn unit_interval_bounds() {
        assert_eq!(unit(u64::MAX), 1.0);
        assert!(unit(0) > 0.0);
    }

    #[test]
    fn deterministic_and_prefix_stable() {
        let m = model(&[2, 3, 5, 7], ExponentLaw::Geometric);
        let a: Vec<_> = sample(&m, 7, 50).unwrap().collect();
        let b: Vec<_> = sample(&m, 7, 50).unwrap().collect();
        assert_eq!(a, b);
        let c: Vec<_> = sample(&m, 7, 10).unwrap().collect();
        assert_eq!(&a[..10], &c[..]);
        let d: Vec<_> = sample(&m, 8, 50).unwrap().collect();
        assert_ne!(a, d);
        assert!(sample(&m, 7, 0).is_err());
    }

    #[test]
    fn coordinates_depend_only_on_seed_draw_and_index() {
        let short = model(&[2, 3], ExponentLaw::Geometric);
        let long = model(&[2, 3, 5, 7, 11], ExponentLaw::Geometric);
        let a: Vec<_> = sample(&short, 3, 20).unwrap().collect();
        let b: Vec<_> = sample(&long, 3, 20).unwrap().collect();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.exponents[..], y.exponents[..2]);
        }
    }

    #[test]
    fn parallel_logs_match_sequential_draws() {
        let m = model(&[2, 3, 5, 7, 11, 13], ExponentLaw::TruncatedAtKMinus1(3));
        let logs = sample_log_values(&m, 11, 500).unwrap();
        for (s, l) in sample(&m, 11, 500).unwrap().zip(&logs) {
            assert!((s.log_value(m.primes()) - l).abs() < 1e-12);
        }
    }

    #[test]
    fn bounded_draws_stay_k_free() {
        for law in [ExponentLaw::ConditionedBelowK(2), ExponentLaw::TruncatedAtKMinus1(3)] {
            let m = model(&[2, 3, 5], law);
            for s in sample(&m, 1, 5000).unwrap() {
                assert!(s.exponents.iter().all(|&c| c <= law.max_exponent().unwrap()));
            }
        }
    }

    #[test]
    fn geometric_mean_at_two() {
        let m = model(&[2], ExponentLaw::Geometric);
        let n = 100_000;
        let mean = sample(&m, 42, n).unwrap().map(|s| s.exponents[0] as f64).sum::<f64>() / n as f64;
        // Var T = p/(p−1)^2 = 2 at p = 2
        let se = (2.0 / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "{mean}");
    }

    fn check_frequencies(law: ExponentLaw, p: u64, draws: Vec<u32>, cells: u32) {
        let n = draws.len() as f64;
        for m in 0..cells {
            let prob = exponent_pmf(law, p, m).unwrap().to_f64();
            let observed = draws.iter().filter(|&&c| c == m).count() as f64 / n;
            let se = (prob * (1.0 - prob) / n).sqrt();
            assert!((observed - prob).abs() < 4.0 * se.max(1e-9), "{law:?} p={p} m={m}");
        }
    }

    #[test]
    fn empirical_frequencies_match_pmf() {
        for law in [
            ExponentLaw::Geometric,
            ExponentLaw::ConditionedBelowK(3),
            ExponentLaw::TruncatedAtKMinus1(3),
        ] {
            let m = model(&[2, 3], law);
            let draws: Vec<Vec<u32>> = sample(&m, 5, 100_000).unwrap().map(|s| s.exponents).collect();
            for (j, &p) in m.primes().iter().enumerate() {
                let col = draws.iter().map(|d| d[j]).collect();
                check_frequencies(law, p, col, 3);
            }
        }
    }

    #[test]
    fn bx_sampler_matches_product_law() {
        for law in [ExponentLaw::Geometric, ExponentLaw::TruncatedAtKMinus1(3), ExponentLaw::ConditionedBelowK(4)] {
            let m = model(&[3], law);
            let n = 100_000;
            let ln3 = 3f64.ln();
            let draws = sample_log_bx(&m, 9, n).unwrap();
            for c in 0..3u32 {
                let prob = bx_product_pmf(law, 3, c).unwrap().to_f64();
                let observed =
                    draws.iter().filter(|&&v| (v / ln3).round() as u32 == c).count() as f64 / n as f64;
                let se = (prob * (1.0 - prob) / n as f64).sqrt();
                assert!((observed - prob).abs() < 4.0 * se, "{law:?} c={c}");
            }
        }
    }
}
