//! Numerical constants and the special functions built on them.

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Apéry's constant ζ(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_2;

/// Γ(x) for x > 0 (Lanczos approximation, ~15 significant digits).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// ζ(2) = π²/6.
pub fn zeta_2() -> f64 {
    std::f64::consts::PI.powi(2) / 6.0
}

/// ζ(6) = π⁶/945.
pub fn zeta_6() -> f64 {
    std::f64::consts::PI.powi(6) / 945.0
}

/// ζ(2)ζ(3)/ζ(6), the growth constant of Σ_{n≤N} 1/φ(n) ~ c·log N.
pub fn totient_harmonic_constant() -> f64 {
    zeta_2() * ZETA_3 / zeta_6()
}
