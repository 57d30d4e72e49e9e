//! Run configuration: every field optional, defaults are the baseline link.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::e2e::{E2EConfig, LinkModel, ModulationScheme};
use crate::fso::{Detection, FsoDerived, FsoGeometry, PhaseFront, PointingParams};
use crate::montecarlo::LinkSampler;
use crate::rf::{
    clt_params, db_to_linear, fit_mixture_gamma, NakagamiParams, RfLinkBudget, ShadowedRicianParams, Shadowing,
};

/// Rejected configuration, tagged with the offending field.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl ToString) -> Self {
        Self { field: field.into(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsoConfig {
    pub ground_altitude_m: f64,
    pub hap_altitude_m: f64,
    pub zenith_deg: f64,
    pub wavelength_nm: f64,
    pub beam_radius_m: f64,
    /// Phase-front radius of curvature; absent means collimated.
    pub phase_front_radius_m: Option<f64>,
    pub wind_rms_mps: f64,
    pub cn2_ground: f64,
    pub visibility_km: f64,
    /// Fixed visibility exponent; absent selects it from the visibility.
    pub q_v: Option<f64>,
}

impl Default for FsoConfig {
    fn default() -> Self {
        let g = FsoGeometry::baseline(40f64.to_radians());
        Self {
            ground_altitude_m: g.ground_altitude_m,
            hap_altitude_m: g.hap_altitude_m,
            zenith_deg: 40.0,
            wavelength_nm: g.wavelength_nm(),
            beam_radius_m: g.beam_radius_m,
            phase_front_radius_m: None,
            wind_rms_mps: g.wind_rms_mps,
            cn2_ground: g.cn2_ground,
            visibility_km: g.visibility_km,
            q_v: g.q_v_override,
        }
    }
}

impl FsoConfig {
    pub fn geometry(&self) -> FsoGeometry {
        FsoGeometry {
            ground_altitude_m: self.ground_altitude_m,
            hap_altitude_m: self.hap_altitude_m,
            zenith_rad: self.zenith_deg.to_radians(),
            wavelength_m: self.wavelength_nm * 1e-9,
            beam_radius_m: self.beam_radius_m,
            phase_front: self.phase_front_radius_m.map_or(PhaseFront::Collimated, PhaseFront::Radius),
            wind_rms_mps: self.wind_rms_mps,
            cn2_ground: self.cn2_ground,
            visibility_km: self.visibility_km,
            q_v_override: self.q_v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointingConfig {
    pub aperture_radius_m: f64,
    pub beam_waist_m: f64,
    pub jitter_m: f64,
    /// `q_H`, horizontal over vertical jitter.
    pub jitter_ratio: f64,
}

impl Default for PointingConfig {
    fn default() -> Self {
        let p = PointingParams::baseline(1.0);
        Self {
            aperture_radius_m: p.aperture_radius_m,
            beam_waist_m: p.beam_waist_m,
            jitter_m: p.jitter_m,
            jitter_ratio: p.jitter_ratio,
        }
    }
}

impl PointingConfig {
    pub fn params(&self) -> PointingParams {
        PointingParams {
            aperture_radius_m: self.aperture_radius_m,
            beam_waist_m: self.beam_waist_m,
            jitter_m: self.jitter_m,
            jitter_ratio: self.jitter_ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrConfig {
    pub b: f64,
    pub m: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfConfig {
    /// HS, AS or LS.
    pub preset: String,
    /// Explicit shadowed-Rician parameters; replace the preset.
    pub shadowed_rician: Option<SrConfig>,
    pub elements: u32,
    pub nakagami_m: f64,
    pub nakagami_omega: f64,
    pub mixture_terms: usize,
    /// The HAP altitude here is always overwritten by `fso.hap_altitude_m`.
    pub budget: RfLinkBudget,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            preset: "HS".into(),
            shadowed_rician: None,
            elements: 50,
            nakagami_m: 1.0,
            nakagami_omega: 2.0,
            mixture_terms: 75,
            budget: RfLinkBudget::default(),
        }
    }
}

impl RfConfig {
    pub fn shadowed_rician(&self) -> Result<ShadowedRicianParams, ConfigError> {
        match self.shadowed_rician {
            Some(SrConfig { b, m, omega }) => Ok(ShadowedRicianParams { b, m, omega }),
            None => {
                Shadowing::from_str(&self.preset).map(Shadowing::params).map_err(|e| ConfigError::new("rf.preset", e))
            }
        }
    }

    pub fn nakagami(&self) -> NakagamiParams {
        NakagamiParams { m: self.nakagami_m, omega: self.nakagami_omega }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelayConfig {
    pub gain: f64,
    pub detection: Detection,
    pub threshold_db: f64,
}

impl Default for RelayConfig {
    fn default() -> Self {
        Self { gain: 1.0, detection: Detection::Heterodyne, threshold_db: 2.0 }
    }
}

/// Inclusive `start:stop:step` grid in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Self { start_db: 10.0, stop_db: 70.0, step_db: 2.0 }
    }
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        if !self.is_valid() {
            return Vec::new();
        }
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start_db + i as f64 * self.step_db).collect()
    }

    fn is_valid(&self) -> bool {
        self.start_db.is_finite() && self.stop_db >= self.start_db && self.step_db > 0.0 && self.step_db.is_finite()
    }
}

impl FromStr for Sweep {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::new("sweep", format!("expected START:STOP:STEP in dB, got {s:?}"));
        let parts: Vec<f64> = s.split(':').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        match parts[..] {
            [start_db, stop_db, step_db] => Ok(Self { start_db, stop_db, step_db }),
            [db] => Ok(Self { start_db: db, stop_db: db, step_db: 1.0 }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Asymptotic,
    Oracle,
    Mc,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Asymptotic => "asymptotic",
            Mode::Oracle => "oracle",
            Mode::Mc => "mc",
        }
    }
}

impl FromStr for Mode {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(Mode::Analytic),
            "asymptotic" => Ok(Mode::Asymptotic),
            "oracle" => Ok(Mode::Oracle),
            "mc" => Ok(Mode::Mc),
            other => {
                Err(ConfigError::new("modes", format!("unknown mode {other:?} (analytic, asymptotic, oracle, mc)")))
            }
        }
    }
}

/// Comma-separated mode list.
pub fn parse_modes(s: &str) -> Result<Vec<Mode>, ConfigError> {
    let mut modes = s.split(',').filter(|m| !m.trim().is_empty()).map(Mode::from_str).collect::<Result<Vec<_>, _>>()?;
    modes.sort();
    modes.dedup();
    Ok(modes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { seed: 1, samples: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ConfigError::new("output.format", format!("unknown format {s:?} (csv, json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Stdout when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
    /// Report capacity in bits instead of nats.
    pub bits: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub fso: FsoConfig,
    pub pointing: PointingConfig,
    pub rf: RfConfig,
    pub relay: RelayConfig,
    pub sweep: Sweep,
    pub modes: Vec<Mode>,
    /// `ook`, `bpsk`, `mpsk:M`, `mqam:M`; defaults to OOK for IM/DD, BPSK otherwise.
    pub modulation: Option<String>,
    pub mc: McConfig,
    pub output: OutputConfig,
    /// Mixture sizes tried by `fit-mg`.
    pub fit_terms: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            fso: FsoConfig::default(),
            pointing: PointingConfig::default(),
            rf: RfConfig::default(),
            relay: RelayConfig::default(),
            sweep: Sweep::default(),
            modes: vec![Mode::Analytic],
            modulation: None,
            mc: McConfig::default(),
            output: OutputConfig::default(),
            fit_terms: vec![10, 20, 30, 40, 50, 60, 75],
        }
    }
}

/// Everything a sweep needs, built from a validated [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub link: LinkModel,
    pub e2e: E2EConfig,
    pub sampler: LinkSampler,
}

impl RunConfig {
    /// TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if json {
            serde_json::from_str(&text).map_err(|e| ConfigError::new("config", e))
        } else {
            toml::from_str(&text).map_err(|e| ConfigError::new("config", e.to_string().trim_end()))
        }
    }

    /// Fill derived fields: the preset name is upper-cased and the RF budget
    /// takes the optical HAP altitude.
    pub fn normalize(&mut self) {
        self.rf.preset = self.rf.preset.to_ascii_uppercase();
        self.rf.budget.hap_altitude_m = self.fso.hap_altitude_m;
        self.modes.sort();
        self.modes.dedup();
    }

    pub fn scheme(&self) -> Result<ModulationScheme, ConfigError> {
        let name = self.modulation.clone().unwrap_or_else(|| {
            match self.relay.detection {
                Detection::Heterodyne => "bpsk",
                Detection::IntensityModulation => "ook",
            }
            .into()
        });
        let scheme = ModulationScheme::from_str(&name).map_err(|e| ConfigError::new("modulation", e))?;
        if scheme.detection != self.relay.detection {
            return Err(ConfigError::new(
                "modulation",
                format!("{scheme} needs {} detection, relay.detection is {}", scheme.detection, self.relay.detection),
            ));
        }
        Ok(scheme)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.fso.geometry().validate().map_err(|e| ConfigError::new("fso", e))?;
        self.pointing.params().validate().map_err(|e| ConfigError::new("pointing", e))?;
        self.rf.shadowed_rician()?.validate().map_err(|e| ConfigError::new("rf.shadowed_rician", e))?;
        self.rf.nakagami().validate().map_err(|e| ConfigError::new("rf.nakagami", e))?;
        self.rf.budget.validate().map_err(|e| ConfigError::new("rf.budget", e))?;
        if self.rf.elements == 0 {
            return Err(ConfigError::new("rf.elements", "need at least one element"));
        }
        if self.rf.mixture_terms == 0 {
            return Err(ConfigError::new("rf.mixture_terms", "need at least one component"));
        }
        if !(self.relay.gain > 0.0) || !self.relay.gain.is_finite() {
            return Err(ConfigError::new("relay.gain", format!("must be positive, got {}", self.relay.gain)));
        }
        if !self.relay.threshold_db.is_finite() {
            return Err(ConfigError::new("relay.threshold_db", "must be finite"));
        }
        if self.sweep.points().is_empty() {
            return Err(ConfigError::new("sweep", format!("empty grid {:?}", self.sweep)));
        }
        if self.modes.is_empty() {
            return Err(ConfigError::new("modes", "no mode selected"));
        }
        if self.modes.contains(&Mode::Mc) && self.mc.samples == 0 {
            return Err(ConfigError::new("mc.samples", "must be positive"));
        }
        if self.fit_terms.contains(&0) {
            return Err(ConfigError::new("fit_terms", "sizes must be positive"));
        }
        Ok(())
    }

    /// Validate and build the link. The first sweep point sets `γ̄_H`.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        self.validate()?;
        let fso = FsoDerived::from_params(&self.fso.geometry(), &self.pointing.params())
            .map_err(|e| ConfigError::new("fso", e))?;
        let sr = self.rf.shadowed_rician()?;
        let nak = self.rf.nakagami();
        let clt = clt_params(self.rf.elements, &sr, &nak).map_err(|e| ConfigError::new("rf", e))?;
        let gamma_bar_u = self.rf.budget.average_snr();
        let mixture =
            fit_mixture_gamma(&clt, gamma_bar_u, self.rf.mixture_terms).map_err(|e| ConfigError::new("rf", e))?;
        let gamma_bar_h = db_to_linear(self.sweep.start_db);
        let e2e = E2EConfig {
            relay_gain: self.relay.gain,
            detection: self.relay.detection,
            threshold: db_to_linear(self.relay.threshold_db),
            gamma_bar_h,
        };
        let sampler = LinkSampler {
            fso,
            detection: self.relay.detection,
            gamma_bar_h,
            relay_gain: self.relay.gain,
            elements: self.rf.elements,
            sr,
            nak,
            gamma_bar_u,
        };
        Ok(Scenario { link: LinkModel { fso, mixture }, e2e, sampler })
    }
}
