use std::f64::consts::PI;

use num_complex::Complex64;

use super::ber::check_scheme;
use super::{check, E2EConfig, E2eError, LinkModel, ModulationScheme, WEIGHT_FLOOR};
use crate::fso::{Detection, FsoDerived, ANGULAR_NODES};
use crate::rf::MixtureGammaModel;
use crate::specfun::quad::legendre;
use crate::specfun::{hyp1f1, ln_gamma, ln_gamma_unchecked};

const COLLISION: f64 = 1e-10;
const NUDGE: f64 = 1e-6;

/// `(sign, ln|Γ(x)|)` for real `x`; a pole gives sign 0.
fn signed_ln_gamma(x: f64) -> (f64, f64) {
    if x <= 0.0 && x == x.round() {
        return (0.0, f64::INFINITY);
    }
    let g = ln_gamma_unchecked(Complex64::new(x, 0.0));
    (g.im.cos().signum(), g.re)
}

/// Move `x` off `target` (and integer shifts of it when `integer_gap`) by a
/// relative nudge.
fn separate(x: f64, target: f64, integer_gap: bool) -> f64 {
    let gap = x - target;
    let off = if integer_gap { gap - gap.round() } else { gap };
    if off.abs() < COLLISION * (1.0 + x.abs()) {
        let moved = x * (1.0 + NUDGE);
        log::debug!("pole collision at {x}; evaluated at {moved}");
        moved
    } else {
        x
    }
}

/// `E[(1 + C/x)^a]` per mixture component, continued analytically in `a`.
struct RelayPowers {
    comps: Vec<(f64, f64)>,
    z: f64,
}

impl RelayPowers {
    fn new(mix: &MixtureGammaModel, relay_gain: f64) -> Self {
        let comps = mix.significant(WEIGHT_FLOOR).map(|c| (c.weight, c.shape)).collect();
        let z = relay_gain * mix.rate();
        if z > 1.0 {
            log::warn!("relay scale Cζ = {z:e} > 1: the high-SNR expansion loses accuracy");
        }
        Self { comps, z }
    }

    /// `Σ_i w_i E_i[(1 + C/x)^a]`; the Kummer split cancels badly once `Cζ > 1`.
    fn mean(&self, a: f64) -> Result<f64, E2eError> {
        let mut acc = 0.0;
        for &(w, b) in &self.comps {
            let a = separate(a, b, true);
            let lead = hyp1f1(-a, 1.0 - b, self.z)?;
            let (s1, l1) = signed_ln_gamma(b - a);
            let (s2, l2) = signed_ln_gamma(-b);
            let (s3, l3) = signed_ln_gamma(-a);
            let branch = if s3 == 0.0 {
                0.0
            } else {
                let ln = b * self.z.ln() + l1 + l2 - ln_gamma(b) - l3;
                s1 * s2 * s3 * ln.exp() * hyp1f1(b - a, b + 1.0, self.z)?
            };
            acc += w * (lead + branch);
        }
        Ok(acc)
    }
}

/// Leading residues of the gain distribution: `Σ c_h v^h` with the relay
/// power `R(h/r)` folded into each coefficient, then passed through `power`.
fn leading_terms(
    d: &FsoDerived,
    cfg: &E2EConfig,
    relay: &RelayPowers,
    power: impl Fn(f64) -> f64,
) -> Result<f64, E2eError> {
    let r = cfg.r();
    let beta = separate(d.beta, d.alpha, true);
    let alpha = d.alpha;
    let ln_norm = ln_gamma(alpha) + ln_gamma(beta);
    let e2 = d.eta2();
    let (sab, lab) = signed_ln_gamma(beta - alpha);
    let (sba, lba) = signed_ln_gamma(alpha - beta);
    let r_alpha = relay.mean(alpha / r)?;
    let r_beta = relay.mean(beta / r)?;
    let mut quarter = 0.0;
    for (phi, w) in legendre(ANGULAR_NODES).mapped(0.0, PI / 2.0) {
        let xi = d.xi(phi);
        let k = separate(separate(e2 * xi, alpha, false), beta, false);
        let (s1, l1) = signed_ln_gamma(alpha - k);
        let (s2, l2) = signed_ln_gamma(beta - k);
        let t1 = s1 * s2 * (l1 + l2 - ln_norm).exp() * power(k) * relay.mean(k / r)?;
        let t2 = sab * (lab - ln_norm).exp() * k / (alpha * (k - alpha)) * power(alpha) * r_alpha;
        let t3 = sba * (lba - ln_norm).exp() * k / (beta * (k - beta)) * power(beta) * r_beta;
        quarter += w * (t1 + t2 + t3) / xi;
    }
    Ok(4.0 * quarter / (2.0 * PI * d.jitter_ratio))
}

/// High-SNR expansion of the outage probability.
pub fn outage_asymptotic(link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    if !(cfg.threshold > 0.0) {
        return Ok(0.0);
    }
    let ln_v = link.fso.ln_scaled(cfg.threshold, cfg.gamma_bar_h, cfg.detection);
    let relay = RelayPowers::new(&link.mixture, cfg.relay_gain);
    leading_terms(&link.fso, cfg, &relay, |h| (h * ln_v).exp())
}

/// High-SNR expansion of the average BER.
pub fn avg_ber_asymptotic(scheme: &ModulationScheme, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    check_scheme(scheme, cfg)?;
    let r = cfg.r();
    let p = scheme.p;
    let relay = RelayPowers::new(&link.mixture, cfg.relay_gain);
    let mut total = 0.0;
    for &q in &scheme.q {
        let ln_v = link.fso.ln_scaled(1.0 / q, cfg.gamma_bar_h, cfg.detection);
        total += leading_terms(&link.fso, cfg, &relay, |h| 0.5 * (ln_gamma(p + h / r) - ln_gamma(p) + h * ln_v).exp())?;
    }
    Ok(scheme.delta * total)
}

/// Diversity order `min(α, β, η_s²) / r`; defined for circular jitter only.
pub fn diversity_order(
    alpha: f64,
    beta: f64,
    eta_s: f64,
    detection: Detection,
    jitter_ratio: f64,
) -> Result<f64, E2eError> {
    if jitter_ratio != 1.0 {
        return Err(E2eError::DiversityContract(jitter_ratio));
    }
    if !(alpha > 0.0 && beta > 0.0 && eta_s > 0.0) {
        return Err(E2eError::InvalidParameter(format!("shapes ({alpha}, {beta}, {eta_s}) must be positive")));
    }
    Ok(alpha.min(beta).min(eta_s * eta_s) / detection.exponent())
}

#[cfg(test)]
mod tests {
    use super::super::tests::{cfg, link};
    use super::super::{avg_ber, e2e_cdf, modulation_params, Modulation};
    use super::*;
    use crate::rf::{mixture_pdf, Shadowing};
    use crate::specfun::quad::adaptive;

    #[test]
    fn diversity_min_selection() {
        let h = Detection::Heterodyne;
        assert_eq!(diversity_order(4.0, 2.0, 1.1f64.sqrt(), h, 1.0).unwrap(), 1.1f64.sqrt().powi(2));
        assert_eq!(diversity_order(4.0, 2.0, 5f64.sqrt(), Detection::IntensityModulation, 1.0).unwrap(), 1.0);
        assert!(matches!(diversity_order(4.0, 2.0, 1.0, h, 0.7), Err(E2eError::DiversityContract(_))));
    }

    #[test]
    fn relay_power_matches_quadrature() {
        // Cζ near 0.4: small enough for the series, large enough to matter
        let l = link(Shadowing::Heavy, 1.0, Some(20.0));
        assert!((0.1..1.0).contains(&l.mixture.rate()));
        let relay = RelayPowers::new(&l.mixture, 1.0);
        let m = &l.mixture;
        for a in [-0.7, 0.3, 0.45] {
            let f = |u: f64| {
                let x = u.exp();
                x * mixture_pdf(x, m) * (1.0 + 1.0 / x).powf(a)
            };
            let bp: Vec<f64> = (-60..=10).map(|k| k as f64).collect();
            let want = adaptive(f, &bp, 1e-14, 1e-11, 500).value;
            let got = relay.mean(a).unwrap();
            assert!((got / want - 1.0).abs() < 1e-8, "a={a}: {got} vs {want}");
        }
    }

    #[test]
    fn outage_converges_at_high_snr() {
        let l = link(Shadowing::Heavy, 1.0, None);
        // r = 2 halves the decade rate, so IM/DD needs a far higher SNR
        for (det, db) in [(Detection::Heterodyne, 60.0), (Detection::IntensityModulation, 110.0)] {
            let c = cfg(det, db);
            let exact = e2e_cdf(c.threshold, &l, &c).unwrap();
            let asym = outage_asymptotic(&l, &c).unwrap();
            assert!((asym / exact - 1.0).abs() < 0.05, "{det:?}: {asym} vs {exact}");
        }
    }

    #[test]
    fn ber_converges_at_high_snr() {
        let l = link(Shadowing::Heavy, 0.7, None);
        let c = cfg(Detection::Heterodyne, 60.0);
        let bpsk = modulation_params(Modulation::Psk, 2).unwrap();
        let exact = avg_ber(&bpsk, &l, &c).unwrap();
        let asym = avg_ber_asymptotic(&bpsk, &l, &c).unwrap();
        assert!((asym / exact - 1.0).abs() < 0.05, "{asym} vs {exact}");
    }

    #[test]
    fn slope_matches_diversity() {
        let l = link(Shadowing::Average, 1.0, None);
        let d = &l.fso;
        for (det, db) in [(Detection::Heterodyne, 60.0), (Detection::IntensityModulation, 110.0)] {
            let lo = outage_asymptotic(&l, &cfg(det, db)).unwrap();
            let hi = outage_asymptotic(&l, &cfg(det, db + 10.0)).unwrap();
            let slope = (lo / hi).log10();
            let gd = diversity_order(d.alpha, d.beta, d.eta_s, det, 1.0).unwrap();
            assert!((slope / gd - 1.0).abs() < 0.1, "{det:?}: {slope} vs {gd}");
        }
    }
}
