//! Marcum Q-function of order 1/2.
//!
//! `Q_{1/2}(a, b) = P(|X| > b)` for `X ~ N(a, 1)`, which has an erfc form.

use std::f64::consts::SQRT_2;

use libm::erfc;

use super::SpecfunError;

fn check(a: f64, b: f64) -> Result<(), SpecfunError> {
    if !(a >= 0.0) || !(b >= 0.0) {
        return Err(SpecfunError::Domain(format!("marcum_q_half: a = {a}, b = {b} must be >= 0")));
    }
    Ok(())
}

/// `Q_{1/2}(a, b)`.
pub fn marcum_q_half(a: f64, b: f64) -> Result<f64, SpecfunError> {
    check(a, b)?;
    if b == 0.0 {
        return Ok(1.0);
    }
    if b.is_infinite() {
        return Ok(0.0);
    }
    if a > b {
        return Ok(1.0 - marcum_p_half(a, b)?);
    }
    Ok(0.5 * (erfc((b - a) / SQRT_2) + erfc((b + a) / SQRT_2)))
}

/// `1 - Q_{1/2}(a, b) = P(|X| <= b)`, accurate when it is small.
pub fn marcum_p_half(a: f64, b: f64) -> Result<f64, SpecfunError> {
    check(a, b)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    if b.is_infinite() {
        return Ok(1.0);
    }
    if a >= b {
        return Ok((0.5 * (erfc((a - b) / SQRT_2) - erfc((a + b) / SQRT_2))).max(0.0));
    }
    Ok(1.0 - marcum_q_half(a, b)?)
}
