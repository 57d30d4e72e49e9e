use num_complex::Complex64;

use super::{check, correction_contour, ln_c_zeta, E2EConfig, E2eError, LinkModel, MixtureKernel};
use crate::fso::{Detection, FsoDerived, FsoError};
use crate::specfun::{ContourSpec, GammaFactor, GammaFactorList, MellinBarnes};

/// `ln` of `γ̄ (A0 h_al / αβ)^r`, the scale of `γ_H` in Mellin space.
fn ln_snr_scale(d: &FsoDerived, det: Detection, gamma_bar: f64) -> f64 {
    gamma_bar.ln() + det.exponent() * (d.a0 * d.h_al / (d.alpha * d.beta)).ln()
}

/// `E[ln(1 + c γ_H)]` for the optical hop alone, in nats.
pub fn fso_capacity(d: &FsoDerived, det: Detection, gamma_bar: f64, c: f64) -> Result<f64, FsoError> {
    d.validate()?;
    if !(gamma_bar > 0.0) || !(c > 0.0) {
        return Err(FsoError::InvalidParameter(format!(
            "capacity needs positive SNR and constant, got {gamma_bar}, {c}"
        )));
    }
    let r = det.exponent();
    let norm = (-d.ln_gamma_norm()).exp();
    let mult = move |tau: Complex64| d.pointing_moment(r * tau) * norm / tau;
    let list =
        d.gain_factors(GammaFactorList::new(), [r, 0.0]).num(GammaFactor::s(0.0, 1.0)).num(GammaFactor::s(1.0, -1.0));
    let res = MellinBarnes::new(&list, [c.ln() + ln_snr_scale(d, det, gamma_bar), 0.0])
        .with_multiplier(0, &mult)
        .evaluate(&ContourSpec::default())?;
    Ok(res.value)
}

/// Ergodic capacity `E[ln(1 + c0 γ)]` in nats.
pub fn ergodic_capacity(link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    let d = &link.fso;
    let r = cfg.r();
    let kernel = MixtureKernel::new(&link.mixture);
    // s: relay factor, t: the capacity variable τ
    let list = d
        .gain_factors(GammaFactorList::new(), [0.0, r])
        .num(GammaFactor::t(1.0, -1.0))
        .guard(GammaFactor::t(0.0, 1.0))
        .num(GammaFactor::new(0.0, 1.0, 1.0))
        .num(GammaFactor::s(0.0, -1.0))
        .guard(GammaFactor::s(kernel.min_shape(), -1.0));
    let norm = (-d.ln_gamma_norm()).exp();
    let t_mult = move |tau: Complex64| d.pointing_moment(r * tau) * norm / tau;
    let s_mult = move |s: Complex64| kernel.eval(s);
    let ln_w = cfg.capacity_constant().ln() + ln_snr_scale(d, cfg.detection, cfg.gamma_bar_h);
    let res = MellinBarnes::new(&list, [ln_c_zeta(link, cfg), ln_w])
        .with_multiplier(0, &s_mult)
        .with_multiplier(1, &t_mult)
        .evaluate(&correction_contour().with_tolerance(1e-9, 0.0))?;
    if !(res.value >= 0.0) {
        return Err(E2eError::OutOfRange { what: "ergodic capacity", value: res.value });
    }
    Ok(res.value)
}
