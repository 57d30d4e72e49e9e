//! Confluent (1F1) and Gauss (2F1) hypergeometric functions for real arguments.

use super::SpecfunError;

const MAX_TERMS: usize = 1_000_000;
const TOL: f64 = 1e-16;

fn non_positive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

/// Kummer's `1F1(a; b; x)`.
pub fn hyp1f1(a: f64, b: f64, x: f64) -> Result<f64, SpecfunError> {
    if non_positive_integer(b) {
        return Err(SpecfunError::Domain(format!("hyp1f1: b = {b} is a pole")));
    }
    if x == 0.0 || a == 0.0 {
        return Ok(1.0);
    }
    if x < 0.0 {
        // Kummer transformation keeps the series free of cancellation
        return Ok(x.exp() * hyp1f1_series(b - a, b, -x)?);
    }
    hyp1f1_series(a, b, x)
}

fn hyp1f1_series(a: f64, b: f64, x: f64) -> Result<f64, SpecfunError> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * x / (kf + 1.0);
        sum += term;
        if !sum.is_finite() {
            return Err(SpecfunError::Overflow(format!("hyp1f1({a}, {b}, {x})")));
        }
        if term.abs() <= TOL * sum.abs() && kf > x {
            return Ok(sum);
        }
        if term == 0.0 {
            return Ok(sum);
        }
    }
    Err(SpecfunError::NoConvergence(format!("hyp1f1({a}, {b}, {x})")))
}

/// Gauss `2F1(a, b; c; x)` for `x < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64, SpecfunError> {
    if non_positive_integer(c) {
        return Err(SpecfunError::Domain(format!("hyp2f1: c = {c} is a pole")));
    }
    if !(x < 1.0) {
        return Err(SpecfunError::Domain(format!("hyp2f1: x = {x} outside (-inf, 1)")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < 0.0 {
        // Pfaff transformation onto (0, 1)
        let y = x / (x - 1.0);
        return Ok((1.0 - x).powf(-a) * hyp2f1_series(a, c - b, c, y)?);
    }
    hyp2f1_series(a, b, c, x)
}

fn hyp2f1_series(a: f64, b: f64, c: f64, x: f64) -> Result<f64, SpecfunError> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term == 0.0 || (term.abs() <= TOL * sum.abs() && kf > 2.0) {
            return Ok(sum);
        }
    }
    Err(SpecfunError::NoConvergence(format!("hyp2f1({a}, {b}, {c}, {x})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_arguments() {
        assert_eq!(hyp1f1(1.3, 2.2, 0.0).unwrap(), 1.0);
        assert_eq!(hyp2f1(1.3, 0.7, 2.2, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn log_closed_form() {
        let v = hyp2f1(1.0, 1.0, 2.0, 0.5).unwrap();
        let want = -(0.5f64.ln()) / 0.5;
        assert!((v - want).abs() < 1e-14);
        // 2F1(1,1;2;x) = -ln(1-x)/x also on the Pfaff branch
        let x = -0.8;
        let v = hyp2f1(1.0, 1.0, 2.0, x).unwrap();
        assert!((v - (-(1.0f64 - x).ln() / x)).abs() < 1e-14);
    }

    #[test]
    fn kummer_exponential_and_sign() {
        // 1F1(a; a; x) = e^x
        for x in [-30.0, -2.0, 0.5, 12.0, 60.0] {
            let v = hyp1f1(2.5, 2.5, x).unwrap();
            assert!((v / x.exp() - 1.0).abs() < 1e-12, "x={x}");
        }
        // 1F1(1; 2; x) = (e^x - 1)/x
        for x in [-5.0, 0.3, 7.0] {
            let v = hyp1f1(1.0, 2.0, x).unwrap();
            assert!((v - (x.exp() - 1.0) / x).abs() < 1e-13 * v.abs());
        }
    }

    #[test]
    fn poles() {
        assert!(hyp1f1(1.0, -2.0, 0.5).is_err());
        assert!(hyp2f1(1.0, 1.0, 0.0, 0.5).is_err());
        assert!(hyp2f1(1.0, 1.0, 2.0, 1.0).is_err());
    }
}
