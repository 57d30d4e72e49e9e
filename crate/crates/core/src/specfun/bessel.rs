//! Modified Bessel functions `I_ν` and `K_ν` of real order.
//!
//! Temme's method: a continued fraction for `I_{ν+1}/I_ν`, a series
//! (small x) or Steed's continued fraction (large x) for `K_μ` with
//! `|μ| <= 1/2`, then forward recurrence in the order.

use std::f64::consts::PI;

use super::SpecfunError;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 100_000;
const SERIES_SWITCH: f64 = 2.0;

/// Taylor coefficients of `1/Γ(1+x)` about 0.
const RGAMMA1P: [f64; 21] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
];

/// (gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ)) for |μ| <= 1/2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mu2 = mu * mu;
    let mut pw = 1.0;
    for j in (0..RGAMMA1P.len()).step_by(2) {
        gam2 += RGAMMA1P[j] * pw;
        if j + 1 < RGAMMA1P.len() {
            gam1 -= RGAMMA1P[j + 1] * pw;
        }
        pw *= mu2;
    }
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

/// Returns `(I_ν(x), K_ν(x))` for `ν >= 0`, `x > 0`.
fn bessel_ik_nonneg(nu: f64, x: f64) -> Result<(f64, f64), SpecfunError> {
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    // CF1: I'_ν / I_ν
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpecfunError::NoConvergence(format!("bessel CF1 at nu={nu}, x={x}")));
    }

    let mut ril = FPMIN;
    let mut ripl = h * ril;
    let ril1 = ril;
    let mut fact = nu * xi;
    for _ in (1..=nl).rev() {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
    }
    let f = ripl / ril;

    let (mut rkmu, mut rk1);
    if x < SERIES_SWITCH {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut cc = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            cc *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = cc * ff;
            sum += del;
            sum1 += cc * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(SpecfunError::NoConvergence(format!("bessel K series at nu={nu}, x={x}")));
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut ok = false;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(SpecfunError::NoConvergence(format!("bessel CF2 at nu={nu}, x={x}")));
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    let rkmup = xmu * xi * rkmu - rk1;
    let rimu = xi / (f * rkmu - rkmup);
    let ri = rimu * ril1 / ril;
    for i in 1..=nl {
        let rktemp = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    Ok((ri, rkmu))
}

/// `K_ν(x)` for real `ν` and `x > 0`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) {
        return Err(SpecfunError::Domain(format!("bessel_k: x = {x} must be positive")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(bessel_ik_nonneg(nu.abs(), x)?.1)
}

/// `I_ν(x)` for real `ν` and `x >= 0`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64, SpecfunError> {
    if !(x >= 0.0) {
        return Err(SpecfunError::Domain(format!("bessel_i: x = {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 || nu == nu.round() {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let (i, k) = bessel_ik_nonneg(nu.abs(), x)?;
    if nu >= 0.0 {
        return Ok(i);
    }
    // I_{-ν} = I_ν + (2/π) sin(νπ) K_ν
    let m = -nu;
    Ok(i + 2.0 / PI * (m * PI).sin() * k)
}
