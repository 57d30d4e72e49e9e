//! HAP to IRS to user RF cascade: fading primitives, link budget, the
//! Gaussian approximation of the coherent IRS sum and its mixture-Gamma fit.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{
    gamma_lower_reg, gamma_upper_reg, hyp1f1, hyp2f1, ln_gamma, marcum_p_half, marcum_q_half, SpecfunError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RfError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mixture fit overflow: {0}; rescale the average SNR or the element count")]
    FitOverflow(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Shadowed-Rician HAP to IRS element channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowedRicianParams {
    /// Half the average multipath power.
    pub b: f64,
    /// Shadowing severity.
    pub m: f64,
    /// Average line-of-sight power.
    pub omega: f64,
}

/// Named shadowing levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shadowing {
    Heavy,
    Average,
    Light,
}

impl Shadowing {
    pub const ALL: [Shadowing; 3] = [Shadowing::Heavy, Shadowing::Average, Shadowing::Light];

    pub fn params(self) -> ShadowedRicianParams {
        let (b, m, omega) = match self {
            Shadowing::Heavy => (0.063, 1.0, 0.007),
            Shadowing::Average => (0.251, 5.0, 0.279),
            Shadowing::Light => (0.158, 19.0, 1.29),
        };
        ShadowedRicianParams { b, m, omega }
    }

    pub fn code(self) -> &'static str {
        match self {
            Shadowing::Heavy => "HS",
            Shadowing::Average => "AS",
            Shadowing::Light => "LS",
        }
    }
}

impl fmt::Display for Shadowing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Shadowing {
    type Err = RfError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "HS" => Ok(Shadowing::Heavy),
            "AS" => Ok(Shadowing::Average),
            "LS" => Ok(Shadowing::Light),
            _ => Err(RfError::InvalidParameter(format!("unknown shadowing preset {s:?} (HS, AS, LS)"))),
        }
    }
}

impl ShadowedRicianParams {
    pub fn validate(&self) -> Result<(), RfError> {
        if !(self.b > 0.0 && self.m > 0.0 && self.omega >= 0.0) || !(self.b + self.m + self.omega).is_finite() {
            return Err(RfError::InvalidParameter(format!("shadowed-Rician parameters {self:?}")));
        }
        Ok(())
    }

    fn los_ratio(&self) -> f64 {
        2.0 * self.b * self.m / (2.0 * self.b * self.m + self.omega)
    }
}

/// Density of the element power `|α|^2`.
pub fn sr_pdf(x: f64, p: &ShadowedRicianParams) -> Result<f64, RfError> {
    p.validate()?;
    if !(x >= 0.0) {
        return Ok(0.0);
    }
    let two_b = 2.0 * p.b;
    let arg = p.omega * x / (two_b * (two_b * p.m + p.omega));
    let f = hyp1f1(p.m, 1.0, arg)?;
    Ok(p.los_ratio().powf(p.m) * (-x / two_b).exp() / two_b * f)
}

/// `E[|α|^s]` of the element amplitude.
pub fn sr_moment(s: f64, p: &ShadowedRicianParams) -> Result<f64, RfError> {
    p.validate()?;
    if !(s > -2.0) {
        return Err(RfError::InvalidParameter(format!("moment order {s} must exceed -2")));
    }
    let x = p.omega / (2.0 * p.b * p.m + p.omega);
    let h = hyp2f1(0.5 * s + 1.0, p.m, 1.0, x)?;
    let ln = p.m * p.los_ratio().ln() + 0.5 * s * (2.0 * p.b).ln() + ln_gamma(0.5 * s + 1.0);
    Ok(ln.exp() * h)
}

/// Nakagami-m IRS to user element channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    pub m: f64,
    /// Average power.
    pub omega: f64,
}

impl NakagamiParams {
    pub fn validate(&self) -> Result<(), RfError> {
        if !(self.m >= 0.5) || !(self.omega > 0.0) || !self.m.is_finite() || !self.omega.is_finite() {
            return Err(RfError::InvalidParameter(format!("Nakagami parameters {self:?}")));
        }
        Ok(())
    }
}

/// Nakagami-m amplitude density.
pub fn nak_pdf(x: f64, p: &NakagamiParams) -> Result<f64, RfError> {
    p.validate()?;
    if !(x > 0.0) {
        return Ok(if x == 0.0 && p.m == 0.5 { (2.0 / (PI * p.omega)).sqrt() } else { 0.0 });
    }
    let ln = p.m * (p.m / p.omega).ln() + std::f64::consts::LN_2 - ln_gamma(p.m) + (2.0 * p.m - 1.0) * x.ln()
        - p.m * x * x / p.omega;
    Ok(ln.exp())
}

/// `E[β^s]` of the Nakagami amplitude.
pub fn nak_moment(s: f64, p: &NakagamiParams) -> Result<f64, RfError> {
    p.validate()?;
    if !(s > -2.0 * p.m) {
        return Err(RfError::InvalidParameter(format!("moment order {s} must exceed -2m")));
    }
    Ok((ln_gamma(p.m + 0.5 * s) - ln_gamma(p.m) + 0.5 * s * (p.omega / p.m).ln()).exp())
}

/// RF link budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfLinkBudget {
    pub carrier_ghz: f64,
    /// Horizontal HAP to IRS distance.
    pub hap_irs_ground_km: f64,
    /// Horizontal IRS to user distance.
    pub irs_user_ground_m: f64,
    pub hap_altitude_m: f64,
    pub irs_altitude_m: f64,
    pub user_altitude_m: f64,
    pub rain_db_per_km: f64,
    pub atmos_db_per_km: f64,
    pub other_db: f64,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub tx_power_dbm: f64,
    /// Receiver noise power in watts.
    pub noise_w: f64,
    /// Scale rain and gas losses by the HAP to IRS distance.
    pub losses_per_km: bool,
    /// Use this average SNR (dB) instead of the budget.
    pub gamma_u_db: Option<f64>,
}

impl Default for RfLinkBudget {
    fn default() -> Self {
        Self {
            carrier_ghz: 5.0,
            hap_irs_ground_km: 5.0,
            irs_user_ground_m: 10.0,
            hap_altitude_m: 20_000.0,
            irs_altitude_m: 20.0,
            user_altitude_m: 2.0,
            rain_db_per_km: 0.01,
            atmos_db_per_km: 5.4e-3,
            other_db: 2.0,
            tx_gain_db: 50.0,
            rx_gain_db: 50.0,
            tx_power_dbm: 0.0,
            noise_w: 1e-16,
            losses_per_km: true,
            gamma_u_db: None,
        }
    }
}

impl RfLinkBudget {
    pub fn validate(&self) -> Result<(), RfError> {
        let pos = [
            ("carrier", self.carrier_ghz),
            ("IRS altitude", self.irs_altitude_m),
            ("user altitude", self.user_altitude_m),
            ("noise power", self.noise_w),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return Err(RfError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.hap_irs_ground_km >= 0.0) || !(self.irs_user_ground_m >= 0.0) || !(self.hap_altitude_m > 0.0) {
            return Err(RfError::InvalidParameter("distances must be non-negative".into()));
        }
        if self.hap_irs_km() <= 0.0 || self.irs_user_m() <= 0.0 {
            return Err(RfError::InvalidParameter("link distances must be positive".into()));
        }
        Ok(())
    }

    pub fn hap_irs_km(&self) -> f64 {
        let dz = (self.hap_altitude_m - self.irs_altitude_m) / 1000.0;
        self.hap_irs_ground_km.hypot(dz)
    }

    pub fn irs_user_m(&self) -> f64 {
        self.irs_user_ground_m.hypot(self.irs_altitude_m - self.user_altitude_m)
    }

    pub fn free_space_loss_db(&self) -> f64 {
        92.45 + 20.0 * self.carrier_ghz.log10() + 20.0 * self.hap_irs_km().log10()
    }

    pub fn pathloss_hap_irs_db(&self) -> f64 {
        let scale = if self.losses_per_km { self.hap_irs_km() } else { 1.0 };
        self.free_space_loss_db() + (self.rain_db_per_km + self.atmos_db_per_km) * scale + self.other_db
    }

    pub fn pathloss_irs_user_db(&self) -> f64 {
        40.0 * self.irs_user_m().log10() - 20.0 * self.irs_altitude_m.log10() - 20.0 * self.user_altitude_m.log10()
    }

    /// Received power `P_h` in dBm.
    pub fn effective_power_dbm(&self) -> f64 {
        self.tx_power_dbm - self.pathloss_hap_irs_db() - self.pathloss_irs_user_db() + self.tx_gain_db + self.rx_gain_db
    }

    /// Average RF SNR in dB, from the override if set.
    pub fn average_snr_db(&self) -> f64 {
        match self.gamma_u_db {
            Some(db) => db,
            None => self.effective_power_dbm() - 30.0 - 10.0 * self.noise_w.log10(),
        }
    }

    pub fn average_snr(&self) -> f64 {
        db_to_linear(self.average_snr_db())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Mean and variance of the coherent sum `Σ α_i β_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltParams {
    pub elements: u32,
    pub mean: f64,
    pub variance: f64,
}

impl CltParams {
    /// `μ_Z² / (2σ_Z²)`, the Poisson mean of the mixture weights.
    pub fn half_noncentrality(&self) -> f64 {
        self.mean * self.mean / (2.0 * self.variance)
    }

    pub fn validate(&self) -> Result<(), RfError> {
        if !(self.mean >= 0.0) || !(self.variance > 0.0) || !self.mean.is_finite() || !self.variance.is_finite() {
            return Err(RfError::InvalidParameter(format!(
                "sum statistics mean {} variance {} invalid",
                self.mean, self.variance
            )));
        }
        Ok(())
    }
}

pub fn clt_params(elements: u32, sr: &ShadowedRicianParams, nak: &NakagamiParams) -> Result<CltParams, RfError> {
    if elements == 0 {
        return Err(RfError::InvalidParameter("IRS needs at least one element".into()));
    }
    let n = elements as f64;
    let (a1, a2) = (sr_moment(1.0, sr)?, sr_moment(2.0, sr)?);
    let (b1, b2) = (nak_moment(1.0, nak)?, nak_moment(2.0, nak)?);
    let mean = n * a1 * b1;
    Ok(CltParams { elements, mean, variance: n * (a2 * b2 - (a1 * b1).powi(2)) })
}

fn check_gamma_u(gamma_bar_u: f64, clt: &CltParams) -> Result<(), RfError> {
    clt.validate()?;
    if !(gamma_bar_u > 0.0) || !gamma_bar_u.is_finite() {
        return Err(RfError::InvalidParameter(format!("average RF SNR {gamma_bar_u} must be positive")));
    }
    Ok(())
}

/// Density of `γ_U = γ̄_U Z²` with `Z ~ N(μ_Z, σ_Z²)`.
pub fn gamma_u_pdf(gamma: f64, clt: &CltParams, gamma_bar_u: f64) -> Result<f64, RfError> {
    check_gamma_u(gamma_bar_u, clt)?;
    if !(gamma > 0.0) || gamma.is_infinite() {
        return Ok(0.0);
    }
    let x = (gamma / gamma_bar_u).sqrt();
    let sigma = clt.variance.sqrt();
    let lobe = |c: f64| (-0.5 * ((x - c) / sigma).powi(2)).exp();
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt() * 2.0 * gamma_bar_u * x);
    Ok(norm * (lobe(clt.mean) + lobe(-clt.mean)))
}

/// Distribution function of `γ_U`.
pub fn gamma_u_cdf(gamma: f64, clt: &CltParams, gamma_bar_u: f64) -> Result<f64, RfError> {
    check_gamma_u(gamma_bar_u, clt)?;
    if !(gamma > 0.0) {
        return Ok(0.0);
    }
    let sigma = clt.variance.sqrt();
    let b = (gamma / gamma_bar_u).sqrt() / sigma;
    Ok(marcum_p_half(clt.mean / sigma, b)?)
}

/// `1 - F` of `γ_U`.
pub fn gamma_u_ccdf(gamma: f64, clt: &CltParams, gamma_bar_u: f64) -> Result<f64, RfError> {
    check_gamma_u(gamma_bar_u, clt)?;
    if !(gamma > 0.0) {
        return Ok(1.0);
    }
    let sigma = clt.variance.sqrt();
    Ok(marcum_q_half(clt.mean / sigma, (gamma / gamma_bar_u).sqrt() / sigma)?)
}

/// One term `α γ^{β-1} e^{-ζγ}` of a mixture-Gamma density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    /// Coefficient `α_x`, possibly underflowed; see `ln_coeff`.
    pub coeff: f64,
    pub ln_coeff: f64,
    pub shape: f64,
    pub rate: f64,
    /// Probability mass `α Γ(β) ζ^{-β}`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureGammaModel {
    pub components: Vec<MixtureComponent>,
}

impl MixtureGammaModel {
    pub fn terms(&self) -> usize {
        self.components.len()
    }

    /// Common rate of all components.
    pub fn rate(&self) -> f64 {
        self.components[0].rate
    }

    /// Components whose weight is not negligible.
    pub fn significant(&self, eps: f64) -> impl Iterator<Item = &MixtureComponent> {
        self.components.iter().filter(move |c| c.weight > eps)
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Mixture-Gamma fit of the `γ_U` density with `terms` components.
pub fn fit_mixture_gamma(clt: &CltParams, gamma_bar_u: f64, terms: usize) -> Result<MixtureGammaModel, RfError> {
    check_gamma_u(gamma_bar_u, clt)?;
    if terms == 0 {
        return Err(RfError::InvalidParameter("mixture needs at least one component".into()));
    }
    if clt.mean == 0.0 {
        return Err(RfError::InvalidParameter("zero mean sum has no series expansion".into()));
    }
    let (mu, s2, gb) = (clt.mean, clt.variance, gamma_bar_u);
    let rate = 1.0 / (2.0 * gb * s2);
    let ln_rate = rate.ln();
    let ln_lead = 0.25 * (gb * mu * mu).ln() - (2.0 * gb * s2).ln() - mu * mu / (2.0 * s2);
    let ln_base = (mu / (2.0 * s2 * gb.sqrt())).ln();
    let shapes: Vec<f64> = (1..=terms).map(|i| i as f64 - 0.5).collect();
    let ln_theta: Vec<f64> = (1..=terms)
        .map(|i| {
            let fi = i as f64;
            ln_lead - ln_gamma(fi) - ln_gamma(fi - 0.5) + (2.0 * fi - 2.5) * ln_base
        })
        .collect();
    let ln_mass: Vec<f64> = ln_theta.iter().zip(&shapes).map(|(t, b)| t + ln_gamma(*b) - b * ln_rate).collect();
    let ln_norm = log_sum_exp(&ln_mass);
    if !ln_norm.is_finite() || ln_theta.iter().any(|v| !v.is_finite()) {
        return Err(RfError::FitOverflow(format!("normalizer ln = {ln_norm}")));
    }
    let components = (0..terms)
        .map(|i| {
            let ln_coeff = ln_theta[i] - ln_norm;
            MixtureComponent {
                coeff: ln_coeff.exp(),
                ln_coeff,
                shape: shapes[i],
                rate,
                weight: (ln_mass[i] - ln_norm).exp(),
            }
        })
        .collect();
    Ok(MixtureGammaModel { components })
}

pub fn mixture_pdf(gamma: f64, model: &MixtureGammaModel) -> f64 {
    if !(gamma > 0.0) || gamma.is_infinite() {
        return 0.0;
    }
    let lg = gamma.ln();
    model.components.iter().map(|c| (c.ln_coeff + (c.shape - 1.0) * lg - c.rate * gamma).exp()).sum()
}

pub fn mixture_cdf(gamma: f64, model: &MixtureGammaModel) -> Result<f64, RfError> {
    if !(gamma > 0.0) {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for c in &model.components {
        acc += c.weight * gamma_lower_reg(c.shape, c.rate * gamma)?;
    }
    Ok(acc.min(1.0))
}

pub fn mixture_ccdf(gamma: f64, model: &MixtureGammaModel) -> Result<f64, RfError> {
    if !(gamma > 0.0) {
        return Ok(1.0);
    }
    let mut acc = 0.0;
    for c in &model.components {
        acc += c.weight * gamma_upper_reg(c.shape, c.rate * gamma)?;
    }
    Ok(acc.min(1.0))
}

/// Largest `|mixture_cdf - gamma_u_cdf|` on a dense grid over the bulk of `Z`.
pub fn mixture_sup_distance(model: &MixtureGammaModel, clt: &CltParams, gamma_bar_u: f64) -> Result<f64, RfError> {
    let sigma = clt.variance.sqrt();
    let lo = (clt.mean - 12.0 * sigma).max(0.0);
    let hi = clt.mean + 12.0 * sigma;
    let n = 4000;
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let z = lo + (hi - lo) * k as f64 / n as f64;
        let g = gamma_bar_u * z * z;
        let d = (mixture_cdf(g, model)? - gamma_u_cdf(g, clt, gamma_bar_u)?).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}
