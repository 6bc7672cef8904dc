//! Simulation toolkit for chiral emission of giant atoms coupled at
//! time-modulated points to a photonic-crystal waveguide.
//!
//! Modules:
//! - [`pcw_band`]: Bloch band structure of the LC-ladder photonic crystal.
//! - [`coupler`]: flux-modulated coupling loops and momentum-space coupling.
//! - [`dynamics`]: wavefunction simulation of spontaneous emission and
//!   directional flux analysis.
//! - [`nonmarkov`]: pole/branch-cut decomposition of the emitter amplitude
//!   near the band edge.
//! - [`cascade`]: chiral master equation for two cascaded giant atoms.
//! - [`transfer`]: shaped-pulse quantum state transfer between two atoms.
//! - [`config`], [`report`], [`cli`]: run configuration, artifact output,
//!   and the command-line front end.

pub mod cascade;
pub mod cli;
pub mod config;
pub mod coupler;
pub mod dynamics;
pub mod nonmarkov;
pub mod numerics;
pub mod pcw_band;
pub mod report;
pub mod transfer;

/// Qubit detuning above the first band edge: `Δ_d = 2π × 0.1 GHz` (rad/s).
pub const DELTA_D: f64 = 2.0 * std::f64::consts::PI * 0.1e9;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerics(String),
    #[error("no band-1 mode resonant with effective frequency {omega_ghz} GHz")]
    NoResonantMode { omega_ghz: f64 },
    #[error("decay curve is not exponential over the fit window")]
    NonExponential,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Config(e.to_string())
    }
}
