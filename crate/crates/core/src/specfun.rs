//! Complex log-gamma and stable products/quotients of gamma functions.
//!
//! `lngamma` uses the Lanczos approximation (g = 7, nine coefficients) in log
//! form on the right half-plane and the reflection formula for `Re z < 1/2`.
//! Ratios of gamma functions are always formed in log space so that
//! arguments of size |k|/alpha ~ 10^2 do not overflow.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

/// Distance from a non-positive integer below which an argument is a pole.
pub const POLE_TOLERANCE: f64 = 1e-9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// 0.5 * ln(2*pi)
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecFunError {
    #[error("gamma pole at z = {re} + {im}i (nearest non-positive integer {n})")]
    Pole { re: f64, im: f64, n: i64 },
}

/// Returns `Some(n)` when `z` lies within [`POLE_TOLERANCE`] of `-n`, `n >= 0`.
pub fn nearest_pole(z: Complex64) -> Option<i64> {
    if z.re > 0.5 {
        return None;
    }
    let n = (-z.re).round();
    if n < 0.0 {
        return None;
    }
    if (z + n).norm() < POLE_TOLERANCE {
        Some(n as i64)
    } else {
        None
    }
}

/// Principal-branch log-gamma of a complex argument.
///
/// `exp(lngamma(z)) == Gamma(z)`; the imaginary part may differ from other
/// libraries' branch choices by multiples of `2*pi` for `Re z < 1/2`.
pub fn lngamma(z: Complex64) -> Result<Complex64, SpecFunError> {
    if let Some(n) = nearest_pole(z) {
        return Err(SpecFunError::Pole {
            re: z.re,
            im: z.im,
            n,
        });
    }
    if z.re < 0.5 {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        let reflected = lanczos_lngamma(Complex64::new(1.0, 0.0) - z);
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected)
    } else {
        Ok(lanczos_lngamma(z))
    }
}

fn lanczos_lngamma(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// `ln(sin(pi z))` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    if w.im.abs() < 30.0 {
        return w.sin().ln();
    }
    if w.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin w = (i/2) e^{-iw} (1 - e^{2iw}),  |e^{2iw}| = e^{-2 Im w} tiny
    let i = Complex64::i();
    let small = (2.0 * i * w).exp();
    Complex64::new(-std::f64::consts::LN_2, PI / 2.0) - i * w
        + (Complex64::new(1.0, 0.0) - small).ln()
}

/// Result of a gamma quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRatio {
    pub value: Complex64,
    /// Set when some denominator gamma diverged; `value` is then zero.
    pub denominator_pole: bool,
}

/// `prod Gamma(numerators) / prod Gamma(denominators)`, evaluated in log space.
pub fn gamma_ratio(
    numerators: &[Complex64],
    denominators: &[Complex64],
) -> Result<GammaRatio, SpecFunError> {
    let mut log_sum = Complex64::new(0.0, 0.0);
    for &z in numerators {
        log_sum += lngamma(z)?;
    }
    let mut denominator_pole = false;
    for &z in denominators {
        match lngamma(z) {
            Ok(lg) => log_sum -= lg,
            Err(SpecFunError::Pole { .. }) => denominator_pole = true,
        }
    }
    if denominator_pole {
        return Ok(GammaRatio {
            value: Complex64::new(0.0, 0.0),
            denominator_pole,
        });
    }
    Ok(GammaRatio {
        value: log_sum.exp(),
        denominator_pole,
    })
}
