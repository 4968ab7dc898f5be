//! Error function and constants.

/// ζ′(−1), derivative of the Riemann zeta function at −1.
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_9;

/// `2^{−1/6}√π`, the Airy-seed amplitude of the scaled Lax-pair function.
pub fn psi_amplitude() -> f64 {
    2f64.powf(-1.0 / 6.0) * std::f64::consts::PI.sqrt()
}

/// Left-tail constant of the Tracy–Widom GUE distribution, `2^{1/24} e^{ζ′(−1)}`.
pub fn tw2_tail_constant() -> f64 {
    2f64.powf(1.0 / 24.0) * ZETA_PRIME_MINUS_ONE.exp()
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
