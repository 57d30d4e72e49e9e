//! End-to-end SNR of the fixed-gain relay `γ = γ_H γ_U / (γ_U + C)`:
//! distribution, moments, outage, average BER and ergodic capacity.
//!
//! Each metric is a Mellin-Barnes integral whose angular average and
//! mixture sum are folded into separable multipliers, so one contour
//! integral replaces the per-angle, per-component Fox-H sum.

mod asymptotic;
mod ber;
mod capacity;
mod modulation;
mod oracle;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fso::{fso_snr_pdf, gain_cdf_pair, Detection, FsoDerived, FsoError};
use crate::rf::{MixtureGammaModel, RfError};
use crate::specfun::{
    ln_gamma, ln_gamma_unchecked, ContourSpec, EvalResult, GammaFactor, GammaFactorList, MellinBarnes, SpecfunError,
};

pub use asymptotic::{avg_ber_asymptotic, diversity_order, outage_asymptotic};
pub use ber::avg_ber;
pub use capacity::{ergodic_capacity, fso_capacity};
pub use modulation::{modulation_params, Modulation, ModulationScheme};
pub use oracle::{avg_ber_oracle, capacity_oracle, e2e_cdf_oracle, moments_oracle};

/// Mixture components lighter than this are dropped from the kernels.
pub(crate) const WEIGHT_FLOOR: f64 = 1e-18;

/// Tolerated excursion of a probability outside [0, 1] before it is an error.
pub const CLAMP_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum E2eError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} = {value:e} outside [0, 1] beyond tolerance")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("integration did not converge: {0}")]
    Quadrature(String),
    #[error(
        "diversity order needs circular jitter (q_H = 1, got {0}); estimate the slope of outage_asymptotic instead"
    )]
    DiversityContract(f64),
    #[error(transparent)]
    Fso(#[from] FsoError),
    #[error(transparent)]
    Rf(#[from] RfError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Relay and receiver settings shared by all metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E2EConfig {
    pub relay_gain: f64,
    pub detection: Detection,
    /// Outage threshold, linear.
    pub threshold: f64,
    /// Average optical-hop SNR, linear.
    pub gamma_bar_h: f64,
}

impl E2EConfig {
    pub fn r(&self) -> f64 {
        self.detection.exponent()
    }

    /// `c0` of the capacity definition: 1 for heterodyne, e/2π for IM/DD.
    pub fn capacity_constant(&self) -> f64 {
        match self.detection {
            Detection::Heterodyne => 1.0,
            Detection::IntensityModulation => std::f64::consts::E / (2.0 * std::f64::consts::PI),
        }
    }

    pub fn validate(&self) -> Result<(), E2eError> {
        if !(self.relay_gain > 0.0) || !self.relay_gain.is_finite() {
            return Err(E2eError::InvalidParameter(format!("relay gain {} must be positive", self.relay_gain)));
        }
        if !(self.gamma_bar_h > 0.0) || !self.gamma_bar_h.is_finite() {
            return Err(E2eError::InvalidParameter(format!("average SNR {} must be positive", self.gamma_bar_h)));
        }
        if !(self.threshold >= 0.0) {
            return Err(E2eError::InvalidParameter(format!("threshold {} must be non-negative", self.threshold)));
        }
        Ok(())
    }

    pub fn with_gamma_bar_h(self, gamma_bar_h: f64) -> Self {
        Self { gamma_bar_h, ..self }
    }
}

/// Both hops of the link, fully parameterized.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    pub fso: FsoDerived,
    pub mixture: MixtureGammaModel,
}

impl LinkModel {
    pub fn validate(&self) -> Result<(), E2eError> {
        self.fso.validate()?;
        if self.mixture.components.is_empty() {
            return Err(E2eError::InvalidParameter("empty mixture".into()));
        }
        Ok(())
    }
}

/// One sweep point of a metric curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub gamma_h_db: f64,
    pub analytic: f64,
    pub asymptotic: Option<f64>,
    pub oracle: Option<f64>,
    /// Monte-Carlo value and its standard error.
    pub mc: Option<(f64, f64)>,
}

/// Accept small quadrature noise outside [0, 1], reject anything larger.
pub(crate) fn clamp_probability(value: f64, what: &'static str) -> Result<f64, E2eError> {
    if (0.0..=1.0).contains(&value) {
        return Ok(value);
    }
    if (-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&value) {
        log::debug!("{what} = {value:e} clamped into [0, 1]");
        return Ok(value.clamp(0.0, 1.0));
    }
    Err(E2eError::OutOfRange { what, value })
}

pub(crate) fn check(link: &LinkModel, cfg: &E2EConfig) -> Result<(), E2eError> {
    link.validate()?;
    cfg.validate()
}

/// `Σ_i w_i Γ(β_i - s)/Γ(β_i)` over the significant mixture components.
pub(crate) struct MixtureKernel {
    terms: Vec<(f64, f64)>,
}

impl MixtureKernel {
    pub(crate) fn new(mix: &MixtureGammaModel) -> Self {
        let terms = mix.significant(WEIGHT_FLOOR).map(|c| (c.weight.ln() - ln_gamma(c.shape), c.shape)).collect();
        Self { terms }
    }

    pub(crate) fn eval(&self, s: Complex64) -> Complex64 {
        self.terms.iter().map(|&(lw, b)| (lw + ln_gamma_unchecked(b - s)).exp()).sum()
    }

    /// Smallest shape in use; poles of the kernel start there.
    pub(crate) fn min_shape(&self) -> f64 {
        self.terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min)
    }
}

/// `ln(C ζ)` for the common mixture rate.
pub(crate) fn ln_c_zeta(link: &LinkModel, cfg: &E2EConfig) -> f64 {
    (cfg.relay_gain * link.mixture.rate()).ln()
}

/// What the relay correction integral is weighted by along `t`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Weight {
    /// Distribution function.
    Cdf,
    /// `-γ` times the density.
    NegGammaPdf,
    /// `Γ(p - t/r)`, the BER kernel.
    Ber { p: f64 },
}

/// Mellin-Barnes integral for the change the relay makes to a metric of
/// the optical-hop SNR:
///
/// ```text
/// (1/r) ∬ M(t) W(t) v^{-t} Σ w_i Γ(β_i - s)/Γ(β_i) Γ(1-s) Γ(s)/Γ(1+s) Γ(s + t/r) (Cζ)^s ds dt
/// ```
pub(crate) fn relay_correction(
    link: &LinkModel,
    cfg: &E2EConfig,
    ln_v: f64,
    weight: Weight,
    contour: &ContourSpec,
) -> Result<EvalResult, SpecfunError> {
    let d = &link.fso;
    let r = cfg.r();
    let kernel = MixtureKernel::new(&link.mixture);
    let mut list = d
        .gain_factors(GammaFactorList::new(), [0.0, 1.0])
        .num(GammaFactor::s(1.0, -1.0))
        .num(GammaFactor::s(0.0, 1.0))
        .den(GammaFactor::s(1.0, 1.0))
        .num(GammaFactor::new(0.0, 1.0, 1.0 / r))
        .guard(GammaFactor::s(kernel.min_shape(), -1.0));
    list = match weight {
        Weight::Cdf => list.den(GammaFactor::t(1.0, 1.0 / r)),
        Weight::NegGammaPdf => list.den(GammaFactor::t(0.0, 1.0 / r)),
        Weight::Ber { p } => list.den(GammaFactor::t(1.0, 1.0 / r)).num(GammaFactor::t(p, -1.0 / r)),
    };
    let norm = (-d.ln_gamma_norm()).exp() / r;
    let t_mult = move |t: Complex64| d.pointing_moment(t) * norm;
    let s_mult = move |s: Complex64| kernel.eval(s);
    let res = MellinBarnes::new(&list, [ln_c_zeta(link, cfg), -ln_v])
        .with_multiplier(0, &s_mult)
        .with_multiplier(1, &t_mult)
        .evaluate(contour)?;
    log::debug!(
        "relay correction {weight:?}: {:e} ± {:e}, anchor {:?}, half-length {}",
        res.value,
        res.abs_err,
        res.anchor,
        res.half_length
    );
    Ok(res)
}

/// Contour settings for two-variable kernels. The integrands decay like
/// `e^{-π|y|}` or faster, so a short first truncation is enough.
pub(crate) fn correction_contour() -> ContourSpec {
    ContourSpec { half_length: 6.0, nodes: 32, ..ContourSpec::default() }.with_tolerance(1e-7, 0.0)
}

/// Correction contour whose absolute tolerance tracks the dominant term.
pub(crate) fn correction_contour_for(dominant: f64) -> ContourSpec {
    correction_contour().with_tolerance(1e-7, 1e-12 * dominant.abs())
}

/// Accuracy asked of the relay correction, relative to the metric.
const CORRECTION_REL: f64 = 1e-6;
/// Rule error of the default correction contour per unit of integrand mass.
const RULE_ERROR: f64 = 1e-10;
const MAX_CORRECTION_NODES: usize = 256;
/// Cancellation floor per unit of integrand mass.
const ROUNDOFF: f64 = 100.0 * f64::EPSILON;

/// [`relay_correction`] with node doubling once the integrand cancels far
/// below its own mass, which happens when `dominant` is tiny (high SNR).
pub(crate) fn resolved_correction(
    link: &LinkModel,
    cfg: &E2EConfig,
    ln_v: f64,
    weight: Weight,
    dominant: f64,
) -> Result<EvalResult, E2eError> {
    let mut spec = correction_contour_for(dominant);
    let mut res = relay_correction(link, cfg, ln_v, weight, &spec)?;
    let target = |r: &EvalResult| CORRECTION_REL * (dominant.abs() + r.value.abs());
    if RULE_ERROR * res.l1 <= target(&res) {
        return Ok(res);
    }
    let unresolved = |nodes: usize, r: &EvalResult| {
        E2eError::Quadrature(format!(
            "relay correction not resolved to {CORRECTION_REL:e} of {dominant:e} at {nodes} nodes (integrand mass {:e})",
            r.l1
        ))
    };
    if ROUNDOFF * res.l1 > target(&res) {
        return Err(unresolved(spec.nodes, &res));
    }
    while spec.nodes < MAX_CORRECTION_NODES {
        spec.nodes *= 2;
        let next = relay_correction(link, cfg, ln_v, weight, &spec)?;
        let diff = (next.value - res.value).abs();
        res = next;
        log::debug!("relay correction at {} nodes moved by {diff:e}", spec.nodes);
        if diff <= target(&res) {
            res.abs_err = res.abs_err.max(diff);
            return Ok(res);
        }
    }
    Err(unresolved(spec.nodes, &res))
}

/// End-to-end distribution function.
pub fn e2e_cdf(gamma: f64, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    if !(gamma > 0.0) {
        return Ok(0.0);
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    let ln_v = link.fso.ln_scaled(gamma, cfg.gamma_bar_h, cfg.detection);
    let (direct, _) = gain_cdf_pair(ln_v, &link.fso)?;
    let delta = resolved_correction(link, cfg, ln_v, Weight::Cdf, direct)?;
    clamp_probability(direct + delta.value, "end-to-end CDF")
}

/// End-to-end density.
pub fn e2e_pdf(gamma: f64, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    if !(gamma > 0.0) || gamma.is_infinite() {
        return Ok(0.0);
    }
    let direct = fso_snr_pdf(gamma, &link.fso, cfg.detection, cfg.gamma_bar_h)?;
    let ln_v = link.fso.ln_scaled(gamma, cfg.gamma_bar_h, cfg.detection);
    let delta = resolved_correction(link, cfg, ln_v, Weight::NegGammaPdf, direct * gamma)?;
    Ok((direct - delta.value / gamma).max(0.0))
}

/// Outage probability at the configured threshold.
pub fn outage_probability(link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    e2e_cdf(cfg.threshold, link, cfg)
}

/// `E[(γ_U / (γ_U + C))^n]` under the mixture.
pub(crate) fn relay_factor_moment(n: f64, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    if !(n > 0.0) {
        return Err(E2eError::InvalidParameter(format!("moment order {n} must be positive")));
    }
    let kernel = MixtureKernel::new(&link.mixture);
    let list = GammaFactorList::new()
        .num(GammaFactor::s(n, 1.0))
        .num(GammaFactor::s(0.0, -1.0))
        .guard(GammaFactor::s(kernel.min_shape(), -1.0));
    let norm = (-ln_gamma(n)).exp();
    let mult = move |s: Complex64| kernel.eval(s) * norm;
    let r = MellinBarnes::new(&list, [ln_c_zeta(link, cfg), 0.0])
        .with_multiplier(0, &mult)
        .evaluate(&ContourSpec::default())?;
    Ok(r.value)
}

/// `E[γ^n]` of the end-to-end SNR.
pub fn moments(n: f64, link: &LinkModel, cfg: &E2EConfig) -> Result<f64, E2eError> {
    check(link, cfg)?;
    let h = crate::fso::fso_snr_moment(n, &link.fso, cfg.detection, cfg.gamma_bar_h)?;
    Ok(h * relay_factor_moment(n, link, cfg)?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::fso::{fso_snr_cdf, FsoGeometry, PointingParams};
    use crate::rf::{clt_params, fit_mixture_gamma, NakagamiParams, RfLinkBudget, Shadowing};
    use crate::specfun::fox_h_bivariate;
    use crate::specfun::quad::adaptive;

    /// Baseline link; `rf_mean_db` overrides the budget so that `E[γ_U]` hits it.
    pub(crate) fn link(sh: Shadowing, q: f64, rf_mean_db: Option<f64>) -> LinkModel {
        let fso =
            FsoDerived::from_params(&FsoGeometry::baseline(40f64.to_radians()), &PointingParams::baseline(q)).unwrap();
        let clt = clt_params(50, &sh.params(), &NakagamiParams { m: 1.0, omega: 2.0 }).unwrap();
        let second = clt.mean * clt.mean + clt.variance;
        let gamma_u_db = rf_mean_db.map(|m| m - 10.0 * second.log10());
        let budget = RfLinkBudget { gamma_u_db, ..RfLinkBudget::default() };
        let mixture = fit_mixture_gamma(&clt, budget.average_snr(), 75).unwrap();
        LinkModel { fso, mixture }
    }

    pub(crate) fn cfg(det: Detection, gamma_bar_h_db: f64) -> E2EConfig {
        E2EConfig {
            relay_gain: 1.0,
            detection: det,
            threshold: 10f64.powf(0.2),
            gamma_bar_h: 10f64.powf(gamma_bar_h_db / 10.0),
        }
    }

    #[test]
    fn cdf_limits() {
        let l = link(Shadowing::Heavy, 1.0, None);
        let c = cfg(Detection::Heterodyne, 30.0);
        assert_eq!(e2e_cdf(0.0, &l, &c).unwrap(), 0.0);
        assert_eq!(e2e_cdf(f64::INFINITY, &l, &c).unwrap(), 1.0);
        assert!(e2e_cdf(1e-10, &l, &c).unwrap() < 1e-6);
        assert!(e2e_cdf(1e9, &l, &c).unwrap() > 1.0 - 1e-6);
    }

    #[test]
    fn deep_tail_refines_or_refuses() {
        let l = link(Shadowing::Heavy, 1.0, None);
        let c = cfg(Detection::Heterodyne, 150.0);
        let a = e2e_cdf(c.threshold, &l, &c).unwrap();
        let o = e2e_cdf_oracle(c.threshold, &l, &c).unwrap();
        assert!((a / o - 1.0).abs() < 1e-8, "{a} vs {o}");
        let c = cfg(Detection::Heterodyne, 250.0);
        assert!(matches!(e2e_cdf(c.threshold, &l, &c), Err(E2eError::Quadrature(_))));
    }

    #[test]
    fn weak_rf_hop_matches_oracle() {
        // a 10 dB RF hop makes the relay term dominate
        let l = link(Shadowing::Heavy, 0.7, Some(10.0));
        for det in [Detection::Heterodyne, Detection::IntensityModulation] {
            let c = cfg(det, 30.0);
            for g in [0.5, 3.0, 20.0] {
                let a = e2e_cdf(g, &l, &c).unwrap();
                let o = e2e_cdf_oracle(g, &l, &c).unwrap();
                let direct = fso_snr_cdf(g, &l.fso, det, c.gamma_bar_h).unwrap();
                assert!(a - direct > 1e-3 * a, "relay term too small to test: {a} vs {direct}");
                assert!((a / o - 1.0).abs() < 1e-6, "{det:?} g={g}: {a} vs {o}");
            }
        }
    }

    #[test]
    fn fused_mixture_matches_per_component_fox_h() {
        // circular jitter: the angular average is a single term
        let l = link(Shadowing::Average, 1.0, Some(5.0));
        let c = cfg(Detection::Heterodyne, 25.0);
        let d = &l.fso;
        let gamma = 2.0;
        let ln_v = d.ln_scaled(gamma, c.gamma_bar_h, c.detection);
        let fused = relay_correction(&l, &c, ln_v, Weight::Cdf, &correction_contour()).unwrap().value;
        let e2 = d.eta2();
        let mut sum = 0.0;
        for comp in l.mixture.significant(1e-12) {
            // Γ(α+t)Γ(β+t)Γ(η²+t)/Γ(1+η²+t) · Γ(β_i - s)Γ(1-s)Γ(s)Γ(s+t)/(Γ(1+s)Γ(1+t))
            let list = GammaFactorList::new()
                .num(GammaFactor::t(d.alpha, 1.0))
                .num(GammaFactor::t(d.beta, 1.0))
                .num(GammaFactor::t(e2, 1.0))
                .den(GammaFactor::t(1.0 + e2, 1.0))
                .den(GammaFactor::t(1.0, 1.0))
                .num(GammaFactor::s(comp.shape, -1.0))
                .num(GammaFactor::s(1.0, -1.0))
                .num(GammaFactor::s(0.0, 1.0))
                .den(GammaFactor::s(1.0, 1.0))
                .num(GammaFactor::new(0.0, 1.0, 1.0));
            let h = fox_h_bivariate(&list, c.relay_gain * comp.rate, (-ln_v).exp(), &correction_contour()).unwrap();
            sum += comp.weight * e2 * (-ln_gamma(comp.shape) - d.ln_gamma_norm()).exp() * h.value;
        }
        assert!((fused / sum - 1.0).abs() < 1e-6, "{fused} vs {sum}");
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        let l = link(Shadowing::Light, 0.7, Some(8.0));
        for det in [Detection::Heterodyne, Detection::IntensityModulation] {
            let c = cfg(det, 30.0);
            for g in [0.3, 2.0, 15.0] {
                let central = |h: f64| (e2e_cdf(g + h, &l, &c).unwrap() - e2e_cdf(g - h, &l, &c).unwrap()) / (2.0 * h);
                let fd = (4.0 * central(1e-4 * g) - central(2e-4 * g)) / 3.0;
                let pdf = e2e_pdf(g, &l, &c).unwrap();
                assert!((fd / pdf - 1.0).abs() < 1e-5, "{det:?} g={g}: {fd} vs {pdf}");
            }
        }
    }

    #[test]
    fn pdf_normalized_and_mean() {
        let l = link(Shadowing::Heavy, 1.0, Some(10.0));
        let c = cfg(Detection::Heterodyne, 20.0);
        // the CDF covers the far left tail, where the correction integral cancels
        let bp = [-10.0, -5.0, 0.0, 3.0, 6.0, 9.0];
        let below = e2e_cdf((-10f64).exp(), &l, &c).unwrap();
        let mass = adaptive(|u: f64| u.exp() * e2e_pdf(u.exp(), &l, &c).unwrap(), &bp, 1e-7, 1e-6, 200);
        assert!((mass.value + below - 1.0).abs() < 1e-4, "{} + {below}", mass.value);
        let mean = adaptive(|u: f64| (2.0 * u).exp() * e2e_pdf(u.exp(), &l, &c).unwrap(), &bp, 1e-7, 1e-6, 200);
        let m1 = moments(1.0, &l, &c).unwrap();
        assert!((mean.value / m1 - 1.0).abs() < 1e-3, "{} vs {m1}", mean.value);
    }

    #[test]
    fn moments_against_conditioning() {
        let l = link(Shadowing::Average, 0.6, Some(3.0));
        let c = cfg(Detection::IntensityModulation, 20.0);
        for n in [1.0, 2.0] {
            let got = moments(n, &l, &c).unwrap();
            let want = moments_oracle(n, &l, &c).unwrap();
            assert!((got / want - 1.0).abs() < 1e-7, "n={n}: {got} vs {want}");
        }
        let lo = moments(1.0, &l, &c).unwrap();
        let hi = moments(1.0, &l, &c.with_gamma_bar_h(c.gamma_bar_h * 2.0)).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn clamp_policy() {
        assert_eq!(clamp_probability(-5e-10, "x").unwrap(), 0.0);
        assert_eq!(clamp_probability(1.0 + 5e-10, "x").unwrap(), 1.0);
        assert!(clamp_probability(-1e-6, "x").is_err());
        assert!(clamp_probability(1.01, "x").is_err());
    }
}
