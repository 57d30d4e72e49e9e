//! Cross-mode validation and the mixture-size scan.

use std::fmt;

use serde::Serialize;

use super::config::{ConfigError, Mode, RunConfig};
use super::curve::{sweep, CurveFile, Metric};
use crate::rf::{clt_params, fit_mixture_gamma, mixture_sup_distance, MixtureGammaModel};

/// Analytic against oracle, relative.
pub const ORACLE_TOLERANCE: f64 = 1e-3;
/// Analytic against Monte Carlo, in standard errors.
pub const MC_TOLERANCE: f64 = 3.0;
/// Asymptotic against analytic, relative, from [`ASYMPTOTIC_FROM_DB`] up.
pub const ASYMPTOTIC_TOLERANCE: f64 = 0.05;
pub const ASYMPTOTIC_FROM_DB: f64 = 55.0;
/// Outage points below this are too rare for the Monte-Carlo comparison.
pub const MC_OUTAGE_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Measure {
    Relative,
    StandardErrors,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub gamma_h_db: f64,
    pub pair: &'static str,
    pub measure: Measure,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }

    fn severity(&self) -> f64 {
        if self.value.is_nan() {
            f64::INFINITY
        } else {
            self.value / self.tolerance
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = match self.measure {
            Measure::Relative => "rel",
            Measure::StandardErrors => "SE",
        };
        let verdict = if self.passed() { "ok" } else { "FAIL" };
        write!(
            f,
            "{:>6} dB  {:<20} {unit} {:.3e} (tol {:.1e})  {verdict}",
            self.gamma_h_db, self.pair, self.value, self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub metric: Metric,
    pub checks: Vec<Check>,
    /// Points where a mode failed outright.
    pub failures: Vec<(f64, String)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn worst(&self) -> Option<&Check> {
        self.checks.iter().max_by(|a, b| a.severity().total_cmp(&b.severity()))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        for (db, e) in &self.failures {
            writeln!(f, "{db:>6} dB  error: {e}")?;
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        match self.worst() {
            Some(w) => write!(f, "{verdict}: {} checks, worst {}", self.checks.len(), w.to_string().trim()),
            None => write!(f, "{verdict}: no comparable points"),
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Compare the requested modes point by point.
pub fn validate(config: &RunConfig, metric: Metric) -> Result<(CurveFile, ValidationReport), ConfigError> {
    let has = |m| config.modes.contains(&m);
    let exact = [Mode::Analytic, Mode::Oracle, Mode::Mc].iter().filter(|m| has(**m)).count();
    if exact < 2 {
        return Err(ConfigError::new("modes", "validate needs at least two of analytic, oracle, mc"));
    }
    let curve = sweep(config, metric)?;
    let mut checks = Vec::new();
    for row in &curve.rows {
        let p = &row.point;
        let db = p.gamma_h_db;
        let reference = if has(Mode::Analytic) { Some(p.analytic).filter(|v| !v.is_nan()) } else { p.oracle };
        if let (true, Some(o)) = (has(Mode::Analytic), p.oracle) {
            if !p.analytic.is_nan() {
                checks.push(Check {
                    gamma_h_db: db,
                    pair: "analytic~oracle",
                    measure: Measure::Relative,
                    value: relative(p.analytic, o),
                    tolerance: ORACLE_TOLERANCE,
                });
            }
        }
        if let (Some((v, se)), Some(r)) = (p.mc, reference) {
            let rare = metric == Metric::Op && r < MC_OUTAGE_FLOOR;
            if se > 0.0 && !rare {
                let pair = if has(Mode::Analytic) { "analytic~mc" } else { "oracle~mc" };
                checks.push(Check {
                    gamma_h_db: db,
                    pair,
                    measure: Measure::StandardErrors,
                    value: (r - v).abs() / se,
                    tolerance: MC_TOLERANCE,
                });
            }
        }
        if let (Some(a), Some(r)) = (p.asymptotic, reference) {
            if db >= ASYMPTOTIC_FROM_DB {
                checks.push(Check {
                    gamma_h_db: db,
                    pair: "asymptotic~exact",
                    measure: Measure::Relative,
                    value: relative(a, r),
                    tolerance: ASYMPTOTIC_TOLERANCE,
                });
            }
        }
    }
    let failures = curve.failures().map(|(db, e)| (db, e.to_string())).collect();
    Ok((curve, ValidationReport { metric, checks, failures }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub shadowing: String,
    /// `(N_x, sup |F_mix - F_clt|)` for each size tried.
    pub distances: Vec<(usize, f64)>,
    pub chosen_terms: usize,
    pub chosen_distance: f64,
    pub model: MixtureGammaModel,
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: sup CDF distance, mixture vs Gaussian-sum law", self.shadowing)?;
        for (n, d) in &self.distances {
            writeln!(f, "  N_x = {n:>3}  {d:.3e}")?;
        }
        write!(f, "chosen N_x = {} ({:.3e})", self.chosen_terms, self.chosen_distance)
    }
}

/// Fit the RF mixture at each size in `fit_terms` and at `rf.mixture_terms`.
pub fn fit_mg(config: &RunConfig) -> Result<FitReport, ConfigError> {
    let mut config = config.clone();
    config.normalize();
    config.validate()?;
    let sr = config.rf.shadowed_rician()?;
    let clt = clt_params(config.rf.elements, &sr, &config.rf.nakagami()).map_err(|e| ConfigError::new("rf", e))?;
    let gb = config.rf.budget.average_snr();
    let fit = |n: usize| -> Result<(MixtureGammaModel, f64), ConfigError> {
        let model = fit_mixture_gamma(&clt, gb, n).map_err(|e| ConfigError::new("rf", e))?;
        let d = mixture_sup_distance(&model, &clt, gb).map_err(|e| ConfigError::new("rf", e))?;
        Ok((model, d))
    };
    let mut distances = Vec::new();
    for &n in &config.fit_terms {
        distances.push((n, fit(n)?.1));
    }
    let (model, chosen_distance) = fit(config.rf.mixture_terms)?;
    let shadowing = match config.rf.shadowed_rician {
        Some(p) => format!("b={} m={} omega={}", p.b, p.m, p.omega),
        None => config.rf.preset.clone(),
    };
    Ok(FitReport { shadowing, distances, chosen_terms: config.rf.mixture_terms, chosen_distance, model })
}
