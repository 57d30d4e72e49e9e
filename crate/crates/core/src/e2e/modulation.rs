use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::E2eError;
use crate::fso::Detection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulation {
    Ook,
    Psk,
    Qam,
}

/// BER approximation `δ Σ_k Q(p, q_k γ) / 2` for one scheme and order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationScheme {
    pub kind: Modulation,
    pub order: u32,
    pub delta: f64,
    pub p: f64,
    pub q: Vec<f64>,
    pub detection: Detection,
}

impl ModulationScheme {
    pub fn terms(&self) -> usize {
        self.q.len()
    }

    /// Conditional BER at instantaneous SNR `gamma`.
    pub fn conditional_ber(&self, gamma: f64) -> f64 {
        let tail: f64 = self.q.iter().map(|&q| crate::specfun::gamma_upper_reg(self.p, q * gamma).unwrap_or(0.0)).sum();
        0.5 * self.delta * tail
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.order) {
            (Modulation::Ook, _) => write!(f, "ook"),
            (Modulation::Psk, 2) => write!(f, "bpsk"),
            (Modulation::Psk, m) => write!(f, "mpsk:{m}"),
            (Modulation::Qam, m) => write!(f, "mqam:{m}"),
        }
    }
}

impl FromStr for ModulationScheme {
    type Err = E2eError;

    /// `ook`, `bpsk`, `qpsk`, `mpsk:M`, `mqam:M`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let bad = || E2eError::InvalidParameter(format!("unknown modulation '{s}'"));
        let (kind, order) = match lower.as_str() {
            "ook" => (Modulation::Ook, 2),
            "bpsk" => (Modulation::Psk, 2),
            "qpsk" => (Modulation::Psk, 4),
            other => {
                let (name, m) = other.split_once(':').ok_or_else(bad)?;
                let m: u32 = m.parse().map_err(|_| bad())?;
                match name {
                    "mpsk" | "psk" => (Modulation::Psk, m),
                    "mqam" | "qam" => (Modulation::Qam, m),
                    _ => return Err(bad()),
                }
            }
        };
        modulation_params(kind, order)
    }
}

/// BER coefficients for `kind` at order `order` (ignored for OOK).
pub fn modulation_params(kind: Modulation, order: u32) -> Result<ModulationScheme, E2eError> {
    let bits = |m: u32| f64::from(m.trailing_zeros());
    match kind {
        Modulation::Ook => Ok(ModulationScheme {
            kind,
            order: 2,
            delta: 1.0,
            p: 0.5,
            q: vec![0.5],
            detection: Detection::IntensityModulation,
        }),
        Modulation::Psk => {
            if order < 2 || !order.is_power_of_two() {
                return Err(E2eError::InvalidParameter(format!("PSK order {order} must be a power of two >= 2")));
            }
            let m = f64::from(order);
            let k = bits(order);
            let n = (order / 4).max(1);
            let q = (1..=n).map(|i| (f64::from(2 * i - 1) * PI / m).sin().powi(2) * k).collect();
            Ok(ModulationScheme { kind, order, delta: 2.0 / k.max(2.0), p: 0.5, q, detection: Detection::Heterodyne })
        }
        Modulation::Qam => {
            let side = f64::from(order).sqrt().round() as u32;
            if order < 4 || side * side != order || !order.is_power_of_two() {
                return Err(E2eError::InvalidParameter(format!("QAM order {order} must be a square power of two")));
            }
            let m = f64::from(order);
            let k = bits(order);
            let q = (1..=side / 2).map(|i| 3.0 * f64::from(2 * i - 1).powi(2) / (2.0 * (m - 1.0)) * k).collect();
            Ok(ModulationScheme {
                kind,
                order,
                delta: 4.0 / k * (1.0 - 1.0 / m.sqrt()),
                p: 0.5,
                q,
                detection: Detection::Heterodyne,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ook_row() {
        let m = modulation_params(Modulation::Ook, 0).unwrap();
        assert_eq!((m.delta, m.p, m.q.clone(), m.detection), (1.0, 0.5, vec![0.5], Detection::IntensityModulation));
    }

    #[test]
    fn bpsk_row() {
        let m: ModulationScheme = "bpsk".parse().unwrap();
        assert_eq!(m.delta, 1.0);
        assert_eq!(m.terms(), 1);
        assert!((m.q[0] - 1.0).abs() < 1e-15);
        assert_eq!(m.detection, Detection::Heterodyne);
    }

    #[test]
    fn qam16_row() {
        let m: ModulationScheme = "mqam:16".parse().unwrap();
        assert_eq!(m.terms(), 2);
        assert!((m.delta - 0.75).abs() < 1e-15);
        assert!((m.q[0] - 3.0 / 30.0 * 4.0).abs() < 1e-15);
        assert!((m.q[1] - 27.0 / 30.0 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn psk16_row() {
        let m: ModulationScheme = "mpsk:16".parse().unwrap();
        assert_eq!(m.terms(), 4);
        assert!((m.delta - 0.5).abs() < 1e-15);
        assert!((m.q[0] - (PI / 16.0).sin().powi(2) * 4.0).abs() < 1e-15);
    }

    #[test]
    fn bpsk_conditional_is_gaussian_tail() {
        let m: ModulationScheme = "bpsk".parse().unwrap();
        for g in [0.1, 1.0, 4.0] {
            let want = 0.5 * libm::erfc(f64::sqrt(g));
            assert!((m.conditional_ber(g) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_unsupported_orders() {
        assert!("mpsk:6".parse::<ModulationScheme>().is_err());
        assert!("mqam:8".parse::<ModulationScheme>().is_err());
        assert!("fsk".parse::<ModulationScheme>().is_err());
        assert_eq!("mqam:64".parse::<ModulationScheme>().unwrap().to_string(), "mqam:64");
    }
}
