//! Conditioning-quadrature paths: condition on the RF-hop SNR and integrate
//! optical-hop quantities against the mixture density.

use super::ber::check_scheme;
use super::capacity::fso_capacity;
use super::{check, clamp_probability, E2EConfig, E2eError, LinkModel, ModulationScheme};
use crate::fso::{fso_snr_cdf_pair, fso_snr_moment};
use crate::rf::{mixture_ccdf, mixture_pdf, MixtureGammaModel};
use crate::specfun::ln_gamma;
use crate::specfun::quad::{adaptive, laguerre, Quadrature};

const MAX_SEGMENTS: usize = 2000;
const LAGUERRE_NODES: usize = 200;
/// Split point between the adaptive head and the Laguerre tail of the BER integral.
const BER_SPLIT: f64 = 1.0;

/// Integration range and breakpoints in `u = ln(ζx)` for the mixture.
struct MixtureRange {
    rate: f64,
    breakpoints: Vec<f64>,
}

impl MixtureRange {
    /// Truncate where the mass below is under `eps_lo` and above under `eps_hi`.
    fn new(mix: &MixtureGammaModel, relay_gain: f64, eps_lo: f64, eps_hi: f64) -> Result<Self, E2eError> {
        let rate = mix.rate();
        let comps: Vec<(f64, f64)> = mix.components.iter().map(|c| (c.weight, c.shape)).collect();
        let mean_shape: f64 = comps.iter().map(|(w, b)| w * b).sum();
        let second: f64 = comps.iter().map(|(w, b)| w * b * (b + 1.0)).sum();
        let spread = (second - mean_shape * mean_shape).max(0.0).sqrt() / mean_shape;
        let centre = mean_shape.ln();

        // P(ζx < e^u) <= Σ w e^{βu} / Γ(β+1)
        let mass_below = |u: f64| -> f64 { comps.iter().map(|&(w, b)| w * (b * u - ln_gamma(b + 1.0)).exp()).sum() };
        let u_lo = bisect(|u| mass_below(u) > eps_lo, -740.0, centre);
        let mass_above = |u: f64| mixture_ccdf(u.exp() / rate, mix).unwrap_or(1.0);
        let u_hi = bisect(|u| mass_above(u) < eps_hi, centre, 8.0f64.max(centre + 2.0));

        let mut breakpoints = vec![u_lo, u_hi];
        for k in [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0] {
            breakpoints.push(centre + k * spread.max(1e-3));
        }
        breakpoints.push((relay_gain * rate).ln());
        breakpoints.retain(|u| *u >= u_lo && *u <= u_hi);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        Ok(Self { rate, breakpoints })
    }

    /// `∫ g(x) f_mix(x) dx` with the integrand evaluated in `u`.
    fn integrate(
        &self,
        mix: &MixtureGammaModel,
        mut g: impl FnMut(f64) -> Result<f64, E2eError>,
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<Quadrature, E2eError> {
        let mut failure = None;
        let q = adaptive(
            |u| {
                let x = u.exp() / self.rate;
                let density = x * mixture_pdf(x, mix);
                if density == 0.0 || failure.is_some() {
                    return 0.0;
                }
                match g(x) {
                    Ok(v) => v * density,
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                }
            },
            &self.breakpoints,
            abs_tol,
            rel_tol,
            MAX_SEGMENTS,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if !q.converged {
            return Err(E2eError::Quadrature(format!(
                "mixture integral: estimate {:e} ± {:e} after {} evaluations",
                q.value, q.abs_err, q.evaluations
            )));
        }
        Ok(q)
    }
}

/// Boundary where `inside` flips from false (at `lo`) to true (at `hi`).
fn bisect(inside: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    if inside(lo) {
        return lo;
    }
    if !inside(hi) {
        return hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// End-to-end CDF by conditioning on `γ_U`:
/// `F_H(γ) + ∫ [F_H(γ(1 + C/x)) - F_H(γ)] f_U(x) dx`.
pub fn e2e_cdf_oracle(gamma: f64, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    if !(gamma > 0.0) {
        return Ok(0.0);
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    let (d, det, gb) = (&link.fso, cfg.detection, cfg.gamma_bar_h);
    let (base, base_c) = fso_snr_cdf_pair(gamma, d, det, gb)?;
    // difference taken on whichever side of 1/2 keeps precision
    let lower = base <= 0.5;
    let floor = base.max(f64::MIN_POSITIVE);
    let range = MixtureRange::new(&link.mixture, cfg.relay_gain, 1e-11 * floor, 1e-13 * floor)?;
    let q = range.integrate(
        &link.mixture,
        |x| {
            let (f, fc) = fso_snr_cdf_pair(gamma * (1.0 + cfg.relay_gain / x), d, det, gb)?;
            Ok(if lower { f - base } else { base_c - fc })
        },
        1e-10 * floor,
        1e-9,
    )?;
    clamp_probability(base + q.value, "end-to-end CDF oracle")
}

/// Average BER from the CDF oracle: a substituted adaptive rule on
/// `[0, BER_SPLIT]` and Gauss-Laguerre beyond.
pub fn avg_ber_oracle(scheme: &ModulationScheme, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    check_scheme(scheme, cfg)?;
    let p = scheme.p;
    let norm = 0.5 * (-ln_gamma(p)).exp();
    let mut total = 0.0;
    for &q in &scheme.q {
        // tail: e^{-y0} ∫ e^{-z} (z + y0)^{p-1} F((z + y0)/q) dz
        let mut tail = 0.0;
        let nodes = laguerre(LAGUERRE_NODES);
        for (k, &(z, w)) in nodes.iter().enumerate() {
            let y = z + BER_SPLIT;
            let bound = w * y.powf(p - 1.0);
            if tail > 0.0 && bound * (nodes.len() - k) as f64 <= 1e-12 * tail {
                break;
            }
            tail += bound * e2e_cdf_oracle(y / q, link, cfg)?;
        }
        tail *= (-BER_SPLIT).exp();
        // head: y = w^{1/p} makes the weight y^{p-1} dy = dw / p
        let mut failure = None;
        let head = adaptive(
            |w| {
                if w <= 0.0 || failure.is_some() {
                    return 0.0;
                }
                let y = w.powf(1.0 / p);
                match e2e_cdf_oracle(y / q, link, cfg) {
                    Ok(f) => (-y).exp() * f / p,
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                }
            },
            &[0.0, 0.5 * BER_SPLIT.powf(p), BER_SPLIT.powf(p)],
            1e-8 * tail,
            1e-7,
            200,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        total += norm * (head.value + tail);
    }
    Ok(scheme.delta * total)
}

/// Ergodic capacity by conditioning on `γ_U`: `∫ C_H(c0 x/(x+C)) f_U(x) dx`
/// with `C_H` the optical-hop capacity at a scaled constant.
pub fn capacity_oracle(link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    let c0 = cfg.capacity_constant();
    let range = MixtureRange::new(&link.mixture, cfg.relay_gain, 1e-13, 1e-15)?;
    let q = range.integrate(
        &link.mixture,
        |x| Ok(fso_capacity(&link.fso, cfg.detection, cfg.gamma_bar_h, c0 * x / (x + cfg.relay_gain))?),
        0.0,
        1e-10,
    )?;
    Ok(q.value)
}

/// `E[γ^n]` as the optical-hop moment times a quadrature of `E[(x/(x+C))^n]`.
pub fn moments_oracle(n: f64, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    let h = fso_snr_moment(n, &link.fso, cfg.detection, cfg.gamma_bar_h)?;
    let range = MixtureRange::new(&link.mixture, cfg.relay_gain, 1e-15, 1e-15)?;
    let q = range.integrate(&link.mixture, |x| Ok((x / (x + cfg.relay_gain)).powf(n)), 0.0, 1e-12)?;
    Ok(h * q.value)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{cfg, link};
    use super::*;
    use crate::fso::{fso_snr_cdf, Detection};
    use crate::rf::Shadowing;

    #[test]
    fn vanishing_relay_gain_recovers_optical_hop() {
        let l = link(Shadowing::Average, 0.7, Some(10.0));
        let mut c = cfg(Detection::Heterodyne, 30.0);
        c.relay_gain = 1e-12;
        for g in [1.0, 50.0] {
            let got = e2e_cdf_oracle(g, &l, &c).unwrap();
            let want = fso_snr_cdf(g, &l.fso, c.detection, c.gamma_bar_h).unwrap();
            assert!((got / want - 1.0).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn strong_rf_hop_recovers_optical_hop() {
        let l = link(Shadowing::Light, 1.0, Some(120.0));
        let c = cfg(Detection::IntensityModulation, 30.0);
        let got = e2e_cdf_oracle(2.0, &l, &c).unwrap();
        let want = fso_snr_cdf(2.0, &l.fso, c.detection, c.gamma_bar_h).unwrap();
        assert!((got / want - 1.0).abs() < 1e-8, "{got} vs {want}");
    }
}
