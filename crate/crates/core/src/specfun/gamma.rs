//! Gamma-family functions: complex log-gamma and regularized incomplete gamma.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::SpecfunError;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k (2k-1)) for k = 1..9.
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
];

const SHIFT_RADIUS: f64 = 10.0;

/// Principal-branch `ln Γ(z)`.
///
/// Fails on the poles `z = 0, -1, -2, ...`.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64, SpecfunError> {
    if is_pole(z) {
        return Err(SpecfunError::Pole { re: z.re, im: z.im });
    }
    Ok(ln_gamma_unchecked(z))
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Γ(z)` without the pole check; poles give an infinite real part.
///
/// Used inside integrands, where contours never pass through poles.
#[inline]
pub(crate) fn ln_gamma_unchecked(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let one_minus = Complex64::new(1.0 - z.re, -z.im);
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_right(one_minus);
    }
    ln_gamma_right(z)
}

/// Re z >= 0.5.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut norm_prod = 1.0;
    let mut arg_sum = 0.0;
    while w.norm() < SHIFT_RADIUS {
        norm_prod *= w.norm();
        arg_sum += w.im.atan2(w.re);
        w.re += 1.0;
    }
    let shift = Complex64::new(norm_prod.ln(), arg_sum);
    stirling(w) - shift
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        series = series * inv2 + *c;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series * inv
}

/// `ln sin(πz)` without overflow for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{-iπz} (1 - e^{2iπz}) i/2
    let i = Complex64::new(0.0, 1.0);
    let e2 = (2.0 * PI * i * z).exp();
    -i * PI * z + (Complex64::new(1.0, 0.0) - e2).ln() + Complex64::new(0.5f64.ln(), 0.5 * PI)
}

/// `Γ(p, x) / Γ(p)` for `p > 0`, `x >= 0`.
pub fn gamma_upper_reg(p: f64, x: f64) -> Result<f64, SpecfunError> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(SpecfunError::Domain(format!("gamma_upper_reg: p = {p} must be positive")));
    }
    if !(x >= 0.0) {
        return Err(SpecfunError::Domain(format!("gamma_upper_reg: x = {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(statrs::function::gamma::gamma_ur(p, x))
}

/// `γ(p, x) / Γ(p)` for `p > 0`, `x >= 0`.
pub fn gamma_lower_reg(p: f64, x: f64) -> Result<f64, SpecfunError> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(SpecfunError::Domain(format!("gamma_lower_reg: p = {p} must be positive")));
    }
    if !(x >= 0.0) {
        return Err(SpecfunError::Domain(format!("gamma_lower_reg: x = {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(statrs::function::gamma::gamma_lr(p, x))
}

/// Real `ln Γ(x)` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}
