//! Metric sweeps and the curve file they produce.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ConfigError, Format, Mode, RunConfig, Scenario};
use crate::e2e::{
    avg_ber, avg_ber_asymptotic, avg_ber_oracle, capacity_oracle, e2e_cdf_oracle, ergodic_capacity, outage_asymptotic,
    outage_probability, MetricPoint, ModulationScheme,
};
use crate::montecarlo::{estimate_ber, estimate_capacity, estimate_op, McEstimate, RngStream};
use crate::rf::db_to_linear;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Op,
    Ber,
    Capacity,
}

/// One sweep point; `error` lists the modes that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    #[serde(flatten, with = "point_serde")]
    pub point: MetricPoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub metric: Metric,
    pub modulation: Option<String>,
    pub config: RunConfig,
    /// `sha256:` of the metric, modulation, config and rows.
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub metadata: Metadata,
    pub rows: Vec<CurveRow>,
}

impl CurveFile {
    pub fn failures(&self) -> impl Iterator<Item = (f64, &str)> {
        self.rows.iter().filter_map(|r| r.error.as_deref().map(|e| (r.point.gamma_h_db, e)))
    }

    /// Recompute the hash over the current contents.
    pub fn compute_hash(&self) -> String {
        content_hash(self.metadata.metric, self.metadata.modulation.as_deref(), &self.metadata.config, &self.rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }

    /// Long format: one line per point and mode.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma_h_db,mode,value,stderr\n");
        let num = |v: f64| if v.is_nan() { String::new() } else { v.to_string() };
        for row in &self.rows {
            let p = &row.point;
            let g = p.gamma_h_db;
            let modes = &self.metadata.config.modes;
            if modes.contains(&Mode::Analytic) {
                let _ = writeln!(out, "{g},analytic,{},", num(p.analytic));
            }
            for (mode, v) in [(Mode::Asymptotic, p.asymptotic), (Mode::Oracle, p.oracle)] {
                if modes.contains(&mode) {
                    let _ = writeln!(out, "{g},{},{},", mode.name(), v.map_or(String::new(), num));
                }
            }
            if modes.contains(&Mode::Mc) {
                let (v, se) = p.mc.map_or((String::new(), String::new()), |(v, se)| (num(v), num(se)));
                let _ = writeln!(out, "{g},mc,{v},{se}");
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json() + "\n",
        }
    }

    /// Write to the configured path, or stdout.
    pub fn write(&self, config: &RunConfig) -> std::io::Result<()> {
        let text = self.render(config.output.format);
        match &config.output.path {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

fn content_hash(metric: Metric, modulation: Option<&str>, config: &RunConfig, rows: &[CurveRow]) -> String {
    let body = serde_json::to_vec(&(metric, modulation, config, rows)).expect("curve serializes");
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(&body);
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// Evaluate `metric` over the sweep; points run in parallel, rows keep sweep order.
pub fn sweep(config: &RunConfig, metric: Metric) -> Result<CurveFile, ConfigError> {
    let mut config = config.clone();
    config.normalize();
    let scenario = config.scenario()?;
    let scheme = match metric {
        Metric::Ber => Some(config.scheme()?),
        _ => None,
    };
    let points = config.sweep.points();
    let rows: Vec<CurveRow> = points
        .par_iter()
        .enumerate()
        .map(|(i, &db)| evaluate_point(&config, &scenario, metric, scheme.as_ref(), i, db))
        .collect();
    let modulation = scheme.map(|s| s.to_string());
    let content_hash = content_hash(metric, modulation.as_deref(), &config, &rows);
    let metadata = Metadata {
        tool: "ntnlink".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        metric,
        modulation,
        config,
        content_hash,
    };
    Ok(CurveFile { metadata, rows })
}

fn evaluate_point(
    config: &RunConfig,
    scenario: &Scenario,
    metric: Metric,
    scheme: Option<&ModulationScheme>,
    index: usize,
    db: f64,
) -> CurveRow {
    let gamma_bar = db_to_linear(db);
    let link = &scenario.link;
    let cfg = scenario.e2e.with_gamma_bar_h(gamma_bar);
    let scale = if metric == Metric::Capacity && config.output.bits { std::f64::consts::LN_2.recip() } else { 1.0 };
    let mut errors = Vec::new();
    let mut record = |mode: Mode, r: Result<f64, crate::e2e::E2eError>| match r {
        Ok(v) => Some(v * scale),
        Err(e) => {
            log::warn!("{db} dB, {}: {e}", mode.name());
            errors.push(format!("{}: {e}", mode.name()));
            None
        }
    };

    let analytic = record(
        Mode::Analytic,
        match metric {
            Metric::Op => outage_probability(link, &cfg),
            Metric::Ber => avg_ber(scheme.expect("scheme resolved"), link, &cfg),
            Metric::Capacity => ergodic_capacity(link, &cfg),
        },
    );
    let asymptotic = if config.modes.contains(&Mode::Asymptotic) {
        match metric {
            Metric::Op => record(Mode::Asymptotic, outage_asymptotic(link, &cfg)),
            Metric::Ber => record(Mode::Asymptotic, avg_ber_asymptotic(scheme.expect("scheme resolved"), link, &cfg)),
            Metric::Capacity => None,
        }
    } else {
        None
    };
    let oracle = if config.modes.contains(&Mode::Oracle) {
        record(
            Mode::Oracle,
            match metric {
                Metric::Op => e2e_cdf_oracle(cfg.threshold, link, &cfg),
                Metric::Ber => avg_ber_oracle(scheme.expect("scheme resolved"), link, &cfg),
                Metric::Capacity => capacity_oracle(link, &cfg),
            },
        )
    } else {
        None
    };
    let mc = config.modes.contains(&Mode::Mc).then(|| {
        let mut stream = RngStream::for_point(config.mc.seed, index, 0);
        let sampler = scenario.sampler.with_gamma_bar_h(gamma_bar);
        let n = config.mc.samples;
        let McEstimate { value, stderr, .. } = match metric {
            Metric::Op => estimate_op(&mut stream, n, cfg.threshold, &sampler),
            Metric::Ber => estimate_ber(&mut stream, n, scheme.expect("scheme resolved"), &sampler),
            Metric::Capacity => estimate_capacity(&mut stream, n, cfg.capacity_constant(), &sampler),
        };
        (value * scale, stderr * scale)
    });
    CurveRow {
        point: MetricPoint { gamma_h_db: db, analytic: analytic.unwrap_or(f64::NAN), asymptotic, oracle, mc },
        error: (!errors.is_empty()).then(|| errors.join("; ")),
    }
}

/// `MetricPoint` with a failed (NaN) analytic value written as null.
mod point_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::e2e::MetricPoint;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        gamma_h_db: f64,
        analytic: Option<f64>,
        asymptotic: Option<f64>,
        oracle: Option<f64>,
        mc: Option<(f64, f64)>,
    }

    pub fn serialize<S: Serializer>(p: &MetricPoint, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            gamma_h_db: p.gamma_h_db,
            analytic: (!p.analytic.is_nan()).then_some(p.analytic),
            asymptotic: p.asymptotic,
            oracle: p.oracle,
            mc: p.mc,
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<MetricPoint, D::Error> {
        let r = Repr::deserialize(d)?;
        Ok(MetricPoint {
            gamma_h_db: r.gamma_h_db,
            analytic: r.analytic.unwrap_or(f64::NAN),
            asymptotic: r.asymptotic,
            oracle: r.oracle,
            mc: r.mc,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Sweep;

    fn small() -> RunConfig {
        let mut c = RunConfig {
            sweep: Sweep { start_db: 30.0, stop_db: 40.0, step_db: 10.0 },
            modes: vec![Mode::Analytic, Mode::Mc],
            ..RunConfig::default()
        };
        c.mc.samples = 2000;
        c
    }

    #[test]
    fn rows_follow_sweep_order() {
        let c = small();
        let curve = sweep(&c, Metric::Op).unwrap();
        let g: Vec<f64> = curve.rows.iter().map(|r| r.point.gamma_h_db).collect();
        assert_eq!(g, vec![30.0, 40.0]);
        assert!(curve.rows[0].point.analytic > curve.rows[1].point.analytic);
        assert_eq!(curve.failures().count(), 0);
    }

    #[test]
    fn json_round_trip_and_hash() {
        let curve = sweep(&small(), Metric::Capacity).unwrap();
        let back: CurveFile = serde_json::from_str(&curve.to_json()).unwrap();
        assert_eq!(back, curve);
        assert_eq!(back.compute_hash(), curve.metadata.content_hash);
        assert!(curve.metadata.content_hash.starts_with("sha256:"));
    }

    #[test]
    fn csv_lines_per_mode() {
        let curve = sweep(&small(), Metric::Op).unwrap();
        let csv = curve.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "gamma_h_db,mode,value,stderr");
        assert_eq!(lines.len(), 1 + 2 * 2);
        assert!(lines[1].starts_with("30,analytic,") && lines[1].ends_with(','));
        let mc: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(mc[1], "mc");
        assert!(mc[3].parse::<f64>().unwrap() > 0.0);
    }

    #[test]
    fn failed_analytic_survives_json() {
        let row = CurveRow {
            point: MetricPoint { gamma_h_db: 1.0, analytic: f64::NAN, asymptotic: None, oracle: Some(0.5), mc: None },
            error: Some("analytic: boom".into()),
        };
        let back: CurveRow = serde_json::from_str(&serde_json::to_string(&row).unwrap()).unwrap();
        assert!(back.point.analytic.is_nan());
        assert_eq!(back.point.oracle, Some(0.5));
        assert_eq!(back.error, row.error);
    }

    #[test]
    fn bits_scale_capacity() {
        let mut c = small();
        c.modes = vec![Mode::Analytic];
        let nats = sweep(&c, Metric::Capacity).unwrap().rows[0].point.analytic;
        c.output.bits = true;
        let bits = sweep(&c, Metric::Capacity).unwrap().rows[0].point.analytic;
        assert!((bits * std::f64::consts::LN_2 / nats - 1.0).abs() < 1e-15);
    }
}
