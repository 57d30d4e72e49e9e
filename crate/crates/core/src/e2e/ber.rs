use num_complex::Complex64;

use super::{check, resolved_correction, E2EConfig, E2eError, LinkModel, ModulationScheme, Weight};
use crate::specfun::{ln_gamma, ContourSpec, GammaFactor, GammaFactorList, MellinBarnes};

/// `(q^p / 2Γ(p)) ∫ γ^{p-1} e^{-qγ} F_γ(γ) dγ`.
pub(crate) fn ber_integral(p: f64, q: f64, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    let d = &link.fso;
    let r = cfg.r();
    let ln_v = d.ln_scaled(1.0 / q, cfg.gamma_bar_h, cfg.detection);
    let half = 0.5 * (-ln_gamma(p)).exp();

    // optical hop alone, contour left of the origin
    let norm = (-d.ln_gamma_norm()).exp() * half;
    let mult = move |t: Complex64| -d.pointing_moment(t) * norm / t;
    let list = d
        .gain_factors(GammaFactorList::new(), [1.0, 0.0])
        .num(GammaFactor::s(p, -1.0 / r))
        .guard(GammaFactor::s(0.0, -1.0));
    let direct = MellinBarnes::new(&list, [-ln_v, 0.0]).with_multiplier(0, &mult).evaluate(&ContourSpec::default())?;
    let delta = resolved_correction(link, cfg, ln_v, Weight::Ber { p }, direct.value / half)?;
    Ok(direct.value + half * delta.value)
}

/// Average BER of `scheme` over the end-to-end SNR.
pub fn avg_ber(scheme: &ModulationScheme, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    check_scheme(scheme, cfg)?;
    let mut total = 0.0;
    for &q in &scheme.q {
        total += ber_integral(scheme.p, q, link, cfg)?;
    }
    let ber = scheme.delta * total;
    if !(-1e-9..=0.5 + 1e-9).contains(&ber) {
        return Err(E2eError::OutOfRange { what: "average BER", value: ber });
    }
    Ok(ber.clamp(0.0, 0.5))
}

pub(crate) fn check_scheme(scheme: &ModulationScheme, cfg: &E2EConfig) -> Result<(), E2eError> {
    if scheme.detection != cfg.detection {
        return Err(E2eError::InvalidParameter(format!(
            "{scheme} needs {:?} detection, configuration has {:?}",
            scheme.detection, cfg.detection
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::tests::{cfg, link};
    use super::super::{e2e_cdf, modulation_params, Modulation};
    use super::*;
    use crate::fso::Detection;
    use crate::rf::Shadowing;
    use crate::specfun::quad::adaptive;

    /// Direct quadrature of the BER integral against the analytic CDF.
    fn by_quadrature(p: f64, q: f64, l: &LinkModel, c: &E2EConfig) -> f64 {
        // γ = w^{1/p} / q removes the endpoint singularity
        let f = |w: f64| {
            let y = w.powf(1.0 / p);
            (-y).exp() * e2e_cdf(y / q, l, c).unwrap() / p
        };
        let end = 40f64.powf(p);
        let bp: Vec<f64> = (0..=4).map(|k| end * k as f64 / 4.0).collect();
        adaptive(f, &bp, 1e-12, 1e-7, 200).value * 0.5 * (-ln_gamma(p)).exp()
    }

    #[test]
    fn bpsk_matches_quadrature_of_cdf() {
        let l = link(Shadowing::Heavy, 0.7, Some(10.0));
        let c = cfg(Detection::Heterodyne, 20.0);
        let got = ber_integral(0.5, 1.0, &l, &c).unwrap();
        let want = by_quadrature(0.5, 1.0, &l, &c);
        assert!((got / want - 1.0).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn detection_mismatch_rejected() {
        let l = link(Shadowing::Heavy, 1.0, None);
        let c = cfg(Detection::Heterodyne, 30.0);
        let ook = modulation_params(Modulation::Ook, 2).unwrap();
        assert!(matches!(avg_ber(&ook, &l, &c), Err(E2eError::InvalidParameter(_))));
    }

    #[test]
    fn decreasing_in_snr() {
        let l = link(Shadowing::Average, 1.0, None);
        let bpsk = modulation_params(Modulation::Psk, 2).unwrap();
        let mut prev = 0.5;
        for db in [0.0, 15.0, 30.0, 45.0, 60.0] {
            let b = avg_ber(&bpsk, &l, &cfg(Detection::Heterodyne, db)).unwrap();
            assert!(b < prev, "{db} dB: {b} !< {prev}");
            prev = b;
        }
    }
}
