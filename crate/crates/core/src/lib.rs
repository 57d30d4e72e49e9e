//! Performance metrics for a ground-to-HAP optical uplink relayed over an
//! IRS-assisted RF hop.

pub mod cli;
pub mod e2e;
pub mod fso;
pub mod montecarlo;
pub mod rf;
pub mod specfun;
