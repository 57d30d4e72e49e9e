//! Special functions: log-gamma, incomplete gamma, Bessel, hypergeometric,
//! Marcum Q, and Mellin-Barnes evaluation of Meijer-G and bivariate Fox-H
//! functions.

mod bessel;
mod gamma;
mod hypergeom;
mod marcum;
pub mod mellin;
pub mod quad;

use thiserror::Error;

pub use bessel::{bessel_i, bessel_k};
pub(crate) use gamma::ln_gamma_unchecked;
pub use gamma::{gamma_lower_reg, gamma_upper_reg, ln_gamma, ln_gamma_complex};
pub use hypergeom::{hyp1f1, hyp2f1};
pub use marcum::{marcum_p_half, marcum_q_half};
pub use mellin::{fox_h_bivariate, meijer_g, ContourSpec, EvalResult, GammaFactor, GammaFactorList, MellinBarnes};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("gamma function pole at {re}{im:+}i")]
    Pole { re: f64, im: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow in {0}")]
    Overflow(String),
    #[error("no convergence in {0}")]
    NoConvergence(String),
    #[error("no straight contour separates the poles of {left} from those of {right}")]
    InseparablePoles { left: String, right: String },
    #[error("degenerate parameters: poles of {left} and {right} coincide")]
    Degenerate { left: String, right: String },
    #[error("contour anchor {anchor} puts {factor} at a non-positive real argument")]
    AnchorInfeasible { anchor: f64, factor: String },
    #[error("invalid contour specification: {0}")]
    InvalidContour(String),
}
