//! Optical ground-station to HAP uplink: attenuation, turbulence strength,
//! Gamma-Gamma fading, Hoyt pointing error and the resulting SNR law.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::specfun::quad::{adaptive, legendre};
use crate::specfun::{ln_gamma, meijer_g, ContourSpec, GammaFactor, GammaFactorList, MellinBarnes, SpecfunError};

/// Gauss-Legendre nodes on a quarter period of the pointing angle.
pub const ANGULAR_NODES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FsoError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Transmit phase front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseFront {
    Collimated,
    /// Radius of curvature in meters.
    Radius(f64),
}

/// Uplink geometry and optics, SI units except visibility (km).
#[derive(Debug, Clone, PartialEq)]
pub struct FsoGeometry {
    pub ground_altitude_m: f64,
    pub hap_altitude_m: f64,
    pub zenith_rad: f64,
    pub wavelength_m: f64,
    pub beam_radius_m: f64,
    pub phase_front: PhaseFront,
    pub wind_rms_mps: f64,
    /// Ground-level `C_n^2` in m^(-2/3).
    pub cn2_ground: f64,
    pub visibility_km: f64,
    pub q_v_override: Option<f64>,
}

impl FsoGeometry {
    /// Baseline link: 10 m station, 20 km HAP, 1550 nm, 1 mm collimated beam,
    /// 30 m/s wind, `C_n^2(0) = 1.7e-13`, 10 km visibility with `q_V = 1.6`.
    pub fn baseline(zenith_rad: f64) -> Self {
        Self {
            ground_altitude_m: 10.0,
            hap_altitude_m: 20_000.0,
            zenith_rad,
            wavelength_m: 1550e-9,
            beam_radius_m: 1e-3,
            phase_front: PhaseFront::Collimated,
            wind_rms_mps: 30.0,
            cn2_ground: 1.7e-13,
            visibility_km: 10.0,
            q_v_override: Some(1.6),
        }
    }

    pub fn validate(&self) -> Result<(), FsoError> {
        let bad = |m: String| Err(FsoError::InvalidParameter(m));
        if !(self.ground_altitude_m >= 0.0) || !(self.hap_altitude_m > self.ground_altitude_m) {
            return bad(format!(
                "altitudes must satisfy hap > ground >= 0 (got {} / {})",
                self.hap_altitude_m, self.ground_altitude_m
            ));
        }
        if !(self.zenith_rad >= 0.0 && self.zenith_rad < PI / 2.0) {
            return bad(format!("zenith angle {} rad outside [0, pi/2)", self.zenith_rad));
        }
        for (name, v) in
            [("wavelength", self.wavelength_m), ("beam radius", self.beam_radius_m), ("visibility", self.visibility_km)]
        {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.wind_rms_mps >= 0.0) || !(self.cn2_ground >= 0.0) {
            return bad("wind speed and ground C_n^2 must be non-negative".into());
        }
        if let PhaseFront::Radius(f) = self.phase_front {
            if f == 0.0 || !f.is_finite() {
                return bad(format!("phase-front radius {f} must be finite and non-zero"));
            }
        }
        if let Some(q) = self.q_v_override {
            if !q.is_finite() {
                return bad(format!("q_V override {q} is not finite"));
            }
        }
        Ok(())
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_m * 1e9
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength_m
    }

    /// Slant path length from station to HAP.
    pub fn slant_distance_m(&self) -> f64 {
        (self.hap_altitude_m - self.ground_altitude_m) / self.zenith_rad.cos()
    }

    /// Gaussian-beam parameters at the receiver for the slant path.
    pub fn beam(&self) -> BeamParams {
        BeamParams::at_distance(self, self.slant_distance_m())
    }
}

/// Receiver-plane Gaussian-beam parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    /// Fresnel ratio `Λ`.
    pub fresnel_ratio: f64,
    /// Curvature parameter `Θ`.
    pub curvature: f64,
}

impl BeamParams {
    pub fn at_distance(geom: &FsoGeometry, distance_m: f64) -> Self {
        let lambda0 = 2.0 * distance_m / (geom.wavenumber() * geom.beam_radius_m.powi(2));
        let theta0 = match geom.phase_front {
            PhaseFront::Collimated => 1.0,
            PhaseFront::Radius(f) => 1.0 - distance_m / f,
        };
        let den = lambda0 * lambda0 + theta0 * theta0;
        Self { fresnel_ratio: lambda0 / den, curvature: theta0 / den }
    }
}

/// `q_V` size-distribution exponent from visibility in km.
pub fn q_v_from_visibility(visibility_km: f64) -> f64 {
    if visibility_km > 50.0 {
        1.6
    } else if visibility_km > 6.0 {
        1.3
    } else {
        0.585 * visibility_km.cbrt()
    }
}

/// Beer-Lambert attenuation coefficient in 1/km.
pub fn attenuation_coefficient(wavelength_nm: f64, visibility_km: f64, q_v_override: Option<f64>) -> f64 {
    let q = q_v_override.unwrap_or_else(|| q_v_from_visibility(visibility_km));
    3.912 / visibility_km * (wavelength_nm / 550.0).powf(-q)
}

/// Power transmittance over `distance_km`.
pub fn path_attenuation(coefficient_per_km: f64, distance_km: f64) -> f64 {
    (-coefficient_per_km * distance_km).exp()
}

/// Hufnagel-Valley `C_n^2` at altitude `l` meters.
pub fn hv_cn2(altitude_m: f64, wind_rms_mps: f64, cn2_ground: f64) -> f64 {
    let l = altitude_m;
    0.00594 * (wind_rms_mps / 27.0).powi(2) * (1e-5 * l).powi(10) * (-l / 1000.0).exp()
        + 2.7e-16 * (-l / 1500.0).exp()
        + cn2_ground * (-l / 1000.0).exp()
}

/// Uplink Rytov variance with the Hufnagel-Valley profile.
pub fn rytov_variance(geom: &FsoGeometry) -> Result<f64, FsoError> {
    geom.validate()?;
    let (w, a) = (geom.wind_rms_mps, geom.cn2_ground);
    rytov_variance_with(geom, geom.beam(), |l| hv_cn2(l, w, a))
}

/// Uplink Rytov variance for an arbitrary profile and fixed beam parameters.
pub fn rytov_variance_with<F: Fn(f64) -> f64>(geom: &FsoGeometry, beam: BeamParams, cn2: F) -> Result<f64, FsoError> {
    let (h0, h1) = (geom.ground_altitude_m, geom.hap_altitude_m);
    let lam = beam.fresnel_ratio;
    let theta_bar = 1.0 - beam.curvature;
    let lam56 = lam.powf(5.0 / 6.0);
    let integrand = |l: f64| {
        let c = cn2(l);
        if c == 0.0 {
            return 0.0;
        }
        let xi = (l - h1) / (h0 - h1);
        let z = Complex64::new(lam * xi * xi, xi * (1.0 - theta_bar * xi));
        c * (z.powf(5.0 / 6.0).re - lam56 * xi.powf(5.0 / 3.0))
    };
    let mut breaks = vec![h0];
    for d in [250.0, 1000.0, 3000.0, 8000.0] {
        if h0 + d < h1 {
            breaks.push(h0 + d);
        }
    }
    breaks.push(h1);
    let q = adaptive(integrand, &breaks, 0.0, 1e-10, 4000);
    if !q.converged && q.abs_err > 1e-8 * q.value.abs() {
        return Err(FsoError::Quadrature(format!(
            "Rytov integral: value {:e}, error {:e} after {} evaluations",
            q.value, q.abs_err, q.evaluations
        )));
    }
    let prefactor = 8.7
        * geom.wavenumber().powf(7.0 / 6.0)
        * (h1 - h0).powf(5.0 / 6.0)
        * (1.0 / geom.zenith_rad.cos()).powf(11.0 / 6.0);
    Ok((prefactor * q.value).max(0.0))
}

/// Gamma-Gamma shape parameters with the log variances they came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma2_ln_x: f64,
    pub sigma2_ln_y: f64,
}

impl GgParams {
    /// True when the Rytov variance was zero and both shapes are infinite.
    pub fn is_turbulence_free(&self) -> bool {
        self.alpha.is_infinite() && self.beta.is_infinite()
    }

    /// Scintillation index `exp(σ²_lnX + σ²_lnY) - 1`.
    pub fn scintillation_index(&self) -> f64 {
        (self.sigma2_ln_x + self.sigma2_ln_y).exp_m1()
    }
}

/// Gamma shape `1/(e^{σ²} - 1)` of a log-variance.
pub fn shape_from_log_variance(sigma2: f64) -> f64 {
    1.0 / sigma2.exp_m1()
}

/// Large- and small-scale shapes from the Rytov variance and receiver `Θ`.
pub fn gg_params(rytov: f64, curvature: f64) -> Result<GgParams, FsoError> {
    if !(rytov >= 0.0) || !rytov.is_finite() {
        return Err(FsoError::InvalidParameter(format!("Rytov variance {rytov} must be >= 0")));
    }
    let s125 = rytov.powf(1.2);
    let sigma2_ln_x = 0.49 * rytov / (1.0 + 0.56 * (1.0 + curvature) * s125).powf(7.0 / 6.0);
    let sigma2_ln_y = 0.51 * rytov / (1.0 + 0.69 * s125).powf(5.0 / 6.0);
    Ok(GgParams {
        alpha: shape_from_log_variance(sigma2_ln_x),
        beta: shape_from_log_variance(sigma2_ln_y),
        sigma2_ln_x,
        sigma2_ln_y,
    })
}

/// Receiver aperture and beam jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingParams {
    pub aperture_radius_m: f64,
    pub beam_waist_m: f64,
    /// Vertical jitter standard deviation.
    pub jitter_m: f64,
    /// Horizontal-to-vertical jitter ratio in (0, 1].
    pub jitter_ratio: f64,
}

impl PointingParams {
    /// 5 mm aperture, waist three apertures wide, jitter one aperture.
    pub fn baseline(jitter_ratio: f64) -> Self {
        Self { aperture_radius_m: 5e-3, beam_waist_m: 15e-3, jitter_m: 5e-3, jitter_ratio }
    }

    pub fn validate(&self) -> Result<(), FsoError> {
        for (name, v) in
            [("aperture radius", self.aperture_radius_m), ("beam waist", self.beam_waist_m), ("jitter", self.jitter_m)]
        {
            if !(v > 0.0) || !v.is_finite() {
                return Err(FsoError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.jitter_ratio > 0.0 && self.jitter_ratio <= 1.0) {
            return Err(FsoError::InvalidParameter(format!("jitter ratio {} outside (0, 1]", self.jitter_ratio)));
        }
        Ok(())
    }
}

/// Quantities derived from [`PointingParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingDerived {
    pub v_e: f64,
    /// Fraction of power collected at zero displacement.
    pub a0: f64,
    /// Equivalent beam width to jitter ratio `η_s`.
    pub eta_s: f64,
    /// Equivalent beam width.
    pub omega_eq: f64,
}

pub fn pointing_derived(p: &PointingParams) -> Result<PointingDerived, FsoError> {
    p.validate()?;
    let v_e = p.aperture_radius_m * (PI / 2.0).sqrt() / p.beam_waist_m;
    let a0 = libm::erf(v_e).powi(2);
    let omega_eq = (p.beam_waist_m.powi(2) * (PI * a0).sqrt() / (2.0 * v_e * (-v_e * v_e).exp())).sqrt();
    Ok(PointingDerived { v_e, a0, eta_s: omega_eq / (2.0 * p.jitter_m), omega_eq })
}

/// Detection scheme; fixes the SNR exponent `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Detection {
    #[serde(rename = "heterodyne")]
    Heterodyne,
    #[serde(rename = "imdd")]
    IntensityModulation,
}

impl Detection {
    pub fn exponent(self) -> f64 {
        match self {
            Detection::Heterodyne => 1.0,
            Detection::IntensityModulation => 2.0,
        }
    }

    pub fn from_exponent(r: u8) -> Option<Self> {
        match r {
            1 => Some(Detection::Heterodyne),
            2 => Some(Detection::IntensityModulation),
            _ => None,
        }
    }
}

impl std::fmt::Display for Detection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Detection::Heterodyne => "heterodyne",
            Detection::IntensityModulation => "imdd",
        })
    }
}

impl std::str::FromStr for Detection {
    type Err = FsoError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "heterodyne" => Ok(Detection::Heterodyne),
            "imdd" | "im/dd" => Ok(Detection::IntensityModulation),
            _ => Err(FsoError::InvalidParameter(format!("unknown detection {s:?} (heterodyne, imdd)"))),
        }
    }
}

/// Everything the SNR law needs about the optical hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoDerived {
    pub alpha: f64,
    pub beta: f64,
    pub a0: f64,
    pub eta_s: f64,
    pub h_al: f64,
    pub jitter_ratio: f64,
    pub rytov: f64,
    pub sigma2_ln_x: f64,
    pub sigma2_ln_y: f64,
    pub slant_distance_m: f64,
}

impl FsoDerived {
    pub fn from_params(geom: &FsoGeometry, pointing: &PointingParams) -> Result<Self, FsoError> {
        geom.validate()?;
        let rytov = rytov_variance(geom)?;
        let gg = gg_params(rytov, geom.beam().curvature)?;
        let pd = pointing_derived(pointing)?;
        let d = geom.slant_distance_m();
        let ch = attenuation_coefficient(geom.wavelength_nm(), geom.visibility_km, geom.q_v_override);
        Ok(Self {
            alpha: gg.alpha,
            beta: gg.beta,
            a0: pd.a0,
            eta_s: pd.eta_s,
            h_al: path_attenuation(ch, d / 1000.0),
            jitter_ratio: pointing.jitter_ratio,
            rytov,
            sigma2_ln_x: gg.sigma2_ln_x,
            sigma2_ln_y: gg.sigma2_ln_y,
            slant_distance_m: d,
        })
    }

    pub fn validate(&self) -> Result<(), FsoError> {
        let finite_pos = |v: f64| v > 0.0 && v.is_finite();
        if !finite_pos(self.alpha) || !finite_pos(self.beta) {
            return Err(FsoError::InvalidParameter(format!(
                "turbulence shapes ({}, {}) must be finite and positive",
                self.alpha, self.beta
            )));
        }
        if !(self.a0 > 0.0 && self.a0 <= 1.0) || !(self.h_al > 0.0 && self.h_al <= 1.0) {
            return Err(FsoError::InvalidParameter(format!(
                "A0 = {} and h_al = {} must lie in (0, 1]",
                self.a0, self.h_al
            )));
        }
        if !finite_pos(self.eta_s) {
            return Err(FsoError::InvalidParameter(format!("eta_s = {} must be positive", self.eta_s)));
        }
        if !(self.jitter_ratio > 0.0 && self.jitter_ratio <= 1.0) {
            return Err(FsoError::InvalidParameter(format!("jitter ratio {} outside (0, 1]", self.jitter_ratio)));
        }
        Ok(())
    }

    pub fn eta2(&self) -> f64 {
        self.eta_s * self.eta_s
    }

    /// Smallest pole distance of the gain's Mellin transform from the origin.
    pub fn min_shape(&self) -> f64 {
        self.alpha.min(self.beta).min(self.eta2())
    }

    /// `ξ(φ)` of the Hoyt model.
    pub fn xi(&self, phi: f64) -> f64 {
        let q2 = self.jitter_ratio * self.jitter_ratio;
        (1.0 - (1.0 - q2) * phi.cos().powi(2)) / q2
    }

    /// Angular average `E[(h_pl / A0)^t]`, valid for `Re t > -η_s²`.
    pub fn pointing_moment(&self, t: Complex64) -> Complex64 {
        let e2 = self.eta2();
        let q2 = self.jitter_ratio * self.jitter_ratio;
        e2 / ((e2 + q2 * t).sqrt() * (e2 + t).sqrt())
    }

    /// `ln Γ(α) + ln Γ(β)`.
    pub fn ln_gamma_norm(&self) -> f64 {
        ln_gamma(self.alpha) + ln_gamma(self.beta)
    }

    /// `E[u^t]` for the normalized gain `u = αβ h / (A0 h_al)`.
    pub fn mellin_moment(&self, t: Complex64) -> Complex64 {
        use crate::specfun::ln_gamma_unchecked;
        let ln = ln_gamma_unchecked(self.alpha + t) + ln_gamma_unchecked(self.beta + t) - self.ln_gamma_norm();
        ln.exp() * self.pointing_moment(t)
    }

    /// `ln v` with `v = αβ/(A0 h_al) (γ/γ̄)^{1/r}`.
    pub fn ln_scaled(&self, gamma: f64, gamma_bar: f64, detection: Detection) -> f64 {
        (self.alpha * self.beta / (self.a0 * self.h_al)).ln() + (gamma / gamma_bar).ln() / detection.exponent()
    }

    /// `Γ(α+t) Γ(β+t)` in `var`, plus a guard for the pointing branch point.
    pub(crate) fn gain_factors(&self, list: GammaFactorList, coeff: [f64; 2]) -> GammaFactorList {
        list.num(GammaFactor { offset: self.alpha, coeff })
            .num(GammaFactor { offset: self.beta, coeff })
            .guard(GammaFactor { offset: self.eta2(), coeff })
    }
}

/// Gamma-Gamma density of unit mean.
pub fn gg_pdf(h: f64, alpha: f64, beta: f64) -> Result<f64, FsoError> {
    if !(h > 0.0) {
        return Ok(0.0);
    }
    let ab = alpha * beta;
    let k = crate::specfun::bessel_k(alpha - beta, 2.0 * (ab * h).sqrt())?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let ln = std::f64::consts::LN_2 + 0.5 * (alpha + beta) * ab.ln() - ln_gamma(alpha) - ln_gamma(beta)
        + (0.5 * (alpha + beta) - 1.0) * h.ln()
        + k.ln();
    Ok(ln.exp())
}

/// Hoyt pointing-error density; zero outside `(0, A0]`.
pub fn hoyt_pe_pdf(h: f64, d: &FsoDerived) -> f64 {
    hoyt_pe_pdf_nodes(h, d, ANGULAR_NODES)
}

pub(crate) fn hoyt_pe_pdf_nodes(h: f64, d: &FsoDerived, nodes: usize) -> f64 {
    if !(h > 0.0 && h <= d.a0) {
        log::warn!("pointing gain {h} outside the support (0, {}]", d.a0);
        return 0.0;
    }
    let e2 = d.eta2();
    let ln_ratio = (h / d.a0).ln();
    let quarter = legendre(nodes).integrate(0.0, PI / 2.0, |phi| {
        let k = e2 * d.xi(phi);
        (k * ln_ratio).exp()
    });
    e2 / (2.0 * PI * d.jitter_ratio) * 4.0 * quarter / h
}

fn check_snr_args(gamma: f64, gamma_bar: f64, d: &FsoDerived) -> Result<(), FsoError> {
    d.validate()?;
    if !(gamma_bar > 0.0) || !gamma_bar.is_finite() {
        return Err(FsoError::InvalidParameter(format!("average SNR {gamma_bar} must be positive")));
    }
    if !(gamma >= 0.0) {
        return Err(FsoError::InvalidParameter(format!("SNR {gamma} must be non-negative")));
    }
    Ok(())
}

/// Density of the optical-hop SNR.
pub fn fso_snr_pdf(gamma: f64, d: &FsoDerived, detection: Detection, gamma_bar: f64) -> Result<f64, FsoError> {
    check_snr_args(gamma, gamma_bar, d)?;
    if gamma == 0.0 || gamma.is_infinite() {
        return Ok(0.0);
    }
    let list = d.gain_factors(GammaFactorList::new(), [1.0, 0.0]);
    let norm = d.ln_gamma_norm();
    let mult = move |t: Complex64| d.pointing_moment(t) * (-norm).exp();
    let ln_v = d.ln_scaled(gamma, gamma_bar, detection);
    let r = MellinBarnes::new(&list, [-ln_v, 0.0]).with_multiplier(0, &mult).evaluate(&ContourSpec::default())?;
    Ok((r.value / (detection.exponent() * gamma)).max(0.0))
}

/// Distribution function of the optical-hop SNR.
pub fn fso_snr_cdf(gamma: f64, d: &FsoDerived, detection: Detection, gamma_bar: f64) -> Result<f64, FsoError> {
    Ok(fso_snr_cdf_pair(gamma, d, detection, gamma_bar)?.0)
}

/// `(F, 1 - F)` of the optical-hop SNR, each with full relative accuracy.
pub fn fso_snr_cdf_pair(
    gamma: f64,
    d: &FsoDerived,
    detection: Detection,
    gamma_bar: f64,
) -> Result<(f64, f64), FsoError> {
    check_snr_args(gamma, gamma_bar, d)?;
    if gamma == 0.0 {
        return Ok((0.0, 1.0));
    }
    if gamma.is_infinite() {
        return Ok((1.0, 0.0));
    }
    Ok(gain_cdf_pair(d.ln_scaled(gamma, gamma_bar, detection), d)?)
}

/// `(P(u <= v), P(u > v))` for the normalized gain, given `ln v`.
pub(crate) fn gain_cdf_pair(ln_v: f64, d: &FsoDerived) -> Result<(f64, f64), SpecfunError> {
    let norm = d.ln_gamma_norm();
    let mult = move |t: Complex64| -d.pointing_moment(t) * (-norm).exp() / t;
    // left of the origin below the mean, right of it (minus the unit residue) above
    let mean = d.mellin_moment(Complex64::new(1.0, 0.0)).re;
    let left = ln_v < mean.ln();
    let list = d.gain_factors(GammaFactorList::new(), [1.0, 0.0]);
    let list = if left { list.guard(GammaFactor::s(0.0, -1.0)) } else { list.guard(GammaFactor::s(0.0, 1.0)) };
    let r = MellinBarnes::new(&list, [-ln_v, 0.0]).with_multiplier(0, &mult).evaluate(&ContourSpec::default())?;
    let part = r.value.clamp(-1.0, 1.0);
    Ok(if left { (part.max(0.0), 1.0 - part.max(0.0)) } else { (1.0 + part.min(0.0), (-part).max(0.0)) })
}

/// The CDF as an angular average of per-angle `G^{4,0}_{2,4}` values.
pub fn fso_snr_cdf_by_angle(gamma: f64, d: &FsoDerived, detection: Detection, gamma_bar: f64) -> Result<f64, FsoError> {
    check_snr_args(gamma, gamma_bar, d)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let v = d.ln_scaled(gamma, gamma_bar, detection).exp();
    let e2 = d.eta2();
    let mut quarter = 0.0;
    for (phi, w) in legendre(ANGULAR_NODES).mapped(0.0, PI / 2.0) {
        let k = e2 * d.xi(phi);
        let list = GammaFactorList::meijer_g(4, 0, &[1.0 + k, 1.0], &[0.0, k, d.alpha, d.beta])?;
        quarter += w * meijer_g(&list, v, &ContourSpec::default())?.value;
    }
    let tail = e2 / (2.0 * PI * d.jitter_ratio) * (-d.ln_gamma_norm()).exp() * 4.0 * quarter;
    Ok(1.0 - tail)
}

/// `E[γ^n]` of the optical-hop SNR.
pub fn fso_snr_moment(n: f64, d: &FsoDerived, detection: Detection, gamma_bar: f64) -> Result<f64, FsoError> {
    check_snr_args(1.0, gamma_bar, d)?;
    let r = detection.exponent();
    let t = Complex64::new(r * n, 0.0);
    if r * n <= -d.min_shape() {
        return Err(FsoError::InvalidParameter(format!("moment order {n} below the pole strip")));
    }
    Ok(gamma_bar.powf(n) * (d.a0 * d.h_al / (d.alpha * d.beta)).powf(r * n) * d.mellin_moment(t).re)
}
