//! The `ntnlink` command line.
//!
//! Exit codes: 0 success, 1 I/O, 2 invalid configuration, 3 numeric failure
//! at one or more sweep points, 4 validation disagreement.

pub mod commands;
pub mod config;
pub mod curve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{fit_mg, validate, Check, FitReport, ValidationReport};
pub use config::{ConfigError, Format, Mode, RunConfig, Scenario, Sweep};
pub use curve::{sweep, CurveFile, CurveRow, Metadata, Metric};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("numeric failure at {0} sweep point(s)")]
    Numeric(usize),
    #[error("validation failed: {0}")]
    Disagreement(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Disagreement(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ntnlink", version, about = "Outage, BER and capacity curves for the FSO/RF relay link")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage probability sweep.
    Op(Overrides),
    /// Average BER sweep.
    Ber(Overrides),
    /// Ergodic capacity sweep.
    Capacity(Overrides),
    /// Compare modes point by point.
    Validate {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_enum, default_value = "op")]
        metric: MetricArg,
    },
    /// Mixture-Gamma fit quality against the number of components.
    FitMg(Overrides),
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum MetricArg {
    Op,
    Ber,
    Capacity,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Op => Metric::Op,
            MetricArg::Ber => Metric::Ber,
            MetricArg::Capacity => Metric::Capacity,
        }
    }
}

/// Flags layered over the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML or JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Shadowing preset: HS, AS or LS.
    #[arg(long)]
    pub preset: Option<String>,
    /// heterodyne or imdd.
    #[arg(long)]
    pub detection: Option<String>,
    /// ook, bpsk, mpsk:M or mqam:M.
    #[arg(long = "mod")]
    pub modulation: Option<String>,
    /// Zenith angle in degrees.
    #[arg(long)]
    pub zenith: Option<f64>,
    /// Jitter ratio q_H.
    #[arg(long)]
    pub qh: Option<f64>,
    /// HAP altitude in km.
    #[arg(long = "hap-km")]
    pub hap_km: Option<f64>,
    /// START:STOP:STEP in dB.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Comma-separated subset of analytic, asymptotic, oracle, mc.
    #[arg(long)]
    pub modes: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Capacity in bits rather than nats.
    #[arg(long)]
    pub bits: bool,
}

impl Overrides {
    /// Load the base config (or defaults) and apply the flags.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.preset {
            c.rf.preset = p.clone();
            c.rf.shadowed_rician = None;
        }
        if let Some(d) = &self.detection {
            c.relay.detection = d.parse().map_err(|e| ConfigError::new("detection", e))?;
        }
        if let Some(m) = &self.modulation {
            c.modulation = Some(m.clone());
        }
        if let Some(z) = self.zenith {
            c.fso.zenith_deg = z;
        }
        if let Some(q) = self.qh {
            c.pointing.jitter_ratio = q;
        }
        if let Some(h) = self.hap_km {
            c.fso.hap_altitude_m = h * 1000.0;
        }
        if let Some(s) = &self.sweep {
            c.sweep = s.parse()?;
        }
        if let Some(m) = &self.modes {
            c.modes = config::parse_modes(m)?;
        }
        if let Some(s) = self.seed {
            c.mc.seed = s;
        }
        if let Some(n) = self.samples {
            c.mc.samples = n;
        }
        if let Some(o) = &self.out {
            c.output.path = Some(o.clone());
        }
        if let Some(f) = &self.format {
            c.output.format = f.parse()?;
        }
        if self.bits {
            c.output.bits = true;
        }
        c.normalize();
        c.validate()?;
        Ok(c)
    }
}

fn run_curve(overrides: &Overrides, metric: Metric) -> Result<(), CliError> {
    let config = overrides.resolve()?;
    let curve = sweep(&config, metric)?;
    curve.write(&config)?;
    let failed: Vec<_> = curve.failures().collect();
    for (db, e) in &failed {
        eprintln!("{db} dB: {e}");
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(failed.len()))
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Op(o) => run_curve(o, Metric::Op),
        Command::Ber(o) => run_curve(o, Metric::Ber),
        Command::Capacity(o) => run_curve(o, Metric::Capacity),
        Command::Validate { overrides, metric } => {
            let config = overrides.resolve()?;
            let (curve, report) = validate(&config, (*metric).into())?;
            if config.output.path.is_some() {
                curve.write(&config)?;
            }
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                let worst = report.worst().map_or_else(|| "mode failure".into(), |w| w.to_string().trim().to_string());
                Err(CliError::Disagreement(worst))
            }
        }
        Command::FitMg(o) => {
            let config = o.resolve()?;
            let report = fit_mg(&config)?;
            println!("{report}");
            let dump = serde_json::to_string_pretty(&report.model).expect("model serializes");
            match &config.output.path {
                Some(path) => std::fs::write(path, dump + "\n")?,
                None => println!("{dump}"),
            }
            Ok(())
        }
    }
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ntnlink: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let o = Overrides {
            preset: Some("ls".into()),
            detection: Some("imdd".into()),
            zenith: Some(20.0),
            qh: Some(0.7),
            hap_km: Some(18.0),
            sweep: Some("10:70:2".into()),
            modes: Some("mc,analytic".into()),
            ..Default::default()
        };
        let c = o.resolve().unwrap();
        assert_eq!(c.rf.preset, "LS");
        assert_eq!(c.relay.detection, crate::fso::Detection::IntensityModulation);
        assert_eq!(c.fso.zenith_deg, 20.0);
        assert_eq!(c.pointing.jitter_ratio, 0.7);
        assert_eq!(c.fso.hap_altitude_m, 18_000.0);
        assert_eq!(c.rf.budget.hap_altitude_m, 18_000.0);
        assert_eq!(c.sweep.points().len(), 31);
        assert_eq!(c.modes, vec![Mode::Analytic, Mode::Mc]);
    }

    #[test]
    fn bad_flags_are_config_errors() {
        for o in [
            Overrides { detection: Some("coherent".into()), ..Default::default() },
            Overrides { qh: Some(0.0), ..Default::default() },
            Overrides { sweep: Some("10:70".into()), ..Default::default() },
            Overrides { format: Some("xml".into()), ..Default::default() },
        ] {
            let e = CliError::from(o.resolve().unwrap_err());
            assert_eq!(e.exit_code(), 2, "{e}");
        }
    }

    #[test]
    fn clap_surface() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["ntnlink", "ber", "--mod", "mqam:16", "--sweep", "0:10:5", "--format", "json"])
            .unwrap();
        match cli.command {
            Command::Ber(o) => assert_eq!(o.modulation.as_deref(), Some("mqam:16")),
            _ => panic!("parsed wrong subcommand"),
        }
    }
}
