//! Generalized Mertens formulas checked by computation.
//!
//! The crate builds three random-integer models over a prime subset `A` of
//! natural density `θ`, evaluates their exact probability mass functions,
//! solves the generalized Dickman delay equation for `ρ_θ`, and reproduces
//! the resulting limit theorems as finite-`N` tables:
//!
//! * [`primes`]: sieving, prime subsets and `p_{j;A}`.
//! * [`arith`]: exact rationals, k-free parts, totients, smooth-number sums.
//! * [`dickman`]: `ρ_θ`, the GD(θ) density and CDF, `e^{γθ}Γ(θ+1)`.
//! * [`models`]: exponent laws, model pmfs, seeded samplers.
//! * [`experiments`]: convergence tables, exact identities, KS tests.

pub mod arith;
pub mod constants;
pub mod dickman;
pub mod error;
pub mod experiments;
pub mod models;
pub mod primes;

pub use error::{Error, Result};
