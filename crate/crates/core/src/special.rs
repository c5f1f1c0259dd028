//! Gamma/Beta special functions and sphere/ball geometric constants.
//!
//! Every closed-form constant in this crate is a product of powers of
//! `|S^{n-1}|` and Beta-function values, so these few functions carry the
//! whole accuracy budget. Beta is evaluated through log-space Gamma: the
//! `q -> p` limits push Beta arguments towards `p/(q-p)`, which overflows
//! a direct Gamma product long before the final power rescues it.

use crate::error::{HardyError, Result};

const LN_PI: f64 = 1.144_729_885_849_400_2;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Lanczos coefficients, g = 7, 9 terms. Good for ~15 significant digits
/// over the positive axis.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the Gamma function for `x > 0`.
///
/// Relative error stays below 1e-13 on `[1e-3, 1e3]` (checked in tests
/// against high-precision references).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(HardyError::domain(format!(
            "log_gamma requires x > 0, got {x}"
        )));
    }
    Ok(log_gamma_unchecked(x))
}

fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: ln Γ(x) = ln(π / sin(πx)) - ln Γ(1 - x).
        LN_PI - (std::f64::consts::PI * x).sin().ln() - log_gamma_unchecked(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
    }
}

/// ln B(z, w) = ln Γ(z) + ln Γ(w) - ln Γ(z + w), for `z, w > 0`.
pub fn ln_beta(z: f64, w: f64) -> Result<f64> {
    if !(z.is_finite() && w.is_finite()) || z <= 0.0 || w <= 0.0 {
        return Err(HardyError::domain(format!(
            "beta requires positive arguments, got ({z}, {w})"
        )));
    }
    Ok(log_gamma_unchecked(z) + log_gamma_unchecked(w) - log_gamma_unchecked(z + w))
}

/// The Beta function B(z, w) = Γ(z)Γ(w)/Γ(z+w), computed as `exp(ln_beta)`.
pub fn beta(z: f64, w: f64) -> Result<f64> {
    Ok(ln_beta(z, w)?.exp())
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n`:
/// `|S^{n-1}| = 2 π^{n/2} / Γ(n/2)`.
///
/// `Γ(n/2)` is built by exact recurrence from `Γ(1/2) = √π` and `Γ(1) = 1`,
/// so small dimensions come out correct to the last unit or two.
pub fn sphere_area(n: u32) -> f64 {
    assert!(n >= 1, "sphere_area requires n >= 1");
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Γ(n/2) for positive integer `n`, by recurrence.
fn gamma_half_integer(n: u32) -> f64 {
    let mut value = if n.is_multiple_of(2) { 1.0 } else { SQRT_PI };
    let mut k = if n.is_multiple_of(2) { 2 } else { 1 };
    while k < n {
        // Γ(k/2 + 1) = (k/2) Γ(k/2)
        value *= k as f64 / 2.0;
        k += 2;
    }
    value
}

/// Volume of the ball of radius `r` in `R^n`: `|B(0,r)| = |S^{n-1}| r^n / n`.
pub fn ball_volume(n: u32, r: f64) -> f64 {
    assert!(n >= 1, "ball_volume requires n >= 1");
    assert!(r >= 0.0, "ball_volume requires r >= 0");
    sphere_area(n) * r.powi(n as i32) / n as f64
}
