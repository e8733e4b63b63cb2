//! Small-signal stability of two interconnected subsystems from their
//! terminal impedance or admittance frequency responses.
//!
//! The pipeline orients a proper impedance ratio, counts its open-loop RHP
//! poles from each subsystem's response, tallies clockwise/anticlockwise
//! crossings of the critical ray on the Bode data, and decides stability
//! from N = -P. It stays valid when the ratio has RHP poles, where the
//! classical forbidden-region criteria (also provided) do not apply.
//! Independent oracles - a winding-number sweep and the closed-loop
//! characteristic roots - cross-check every exact-model verdict.

pub mod criteria;
pub mod encircle;
pub mod freq;
pub mod models;
pub mod poly;
pub mod rational;
pub mod rhp;
pub mod verdict;

pub use freq::{BodeSeries, FrequencyGrid, ResponseKind, SampledResponse};
pub use poly::Polynomial;
pub use rational::RationalFunction;
pub use verdict::{
    assess_stability, AnalysisOptions, StabilityReport, SubsystemModel, Verdict,
};

/// Crate version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
