//! TOML run configuration for the command-line tool.

use serde::{Deserialize, Serialize};

use crate::pcw_band::PcwParams;
use crate::Error;

/// Waveguide section; defaults reproduce the reference device.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveguideConfig {
    /// Ground capacitance per length (F/m).
    pub c_g: f64,
    /// Background inductance per length times length scale: `1/η₀` (H·m… the
    /// unmodulated inductance parameter `l₀` in H/m·m² units of the model).
    pub l_0: f64,
    /// Square-wave modulation depth of the inverse inductance.
    pub delta_alpha: f64,
    /// Modulation period (m).
    pub lambda_m: f64,
    /// Plane-wave truncation order of the Bloch expansion.
    pub m_trunc: usize,
}

impl Default for WaveguideConfig {
    fn default() -> Self {
        let p = PcwParams::default();
        Self {
            c_g: p.c_g,
            l_0: p.l_0,
            delta_alpha: p.delta_alpha,
            lambda_m: p.lambda_m,
            m_trunc: p.m_trunc,
        }
    }
}

impl WaveguideConfig {
    pub fn to_params(&self) -> PcwParams {
        PcwParams {
            c_g: self.c_g,
            l_0: self.l_0,
            delta_alpha: self.delta_alpha,
            lambda_m: self.lambda_m,
            m_trunc: self.m_trunc,
        }
    }
}

/// Numerical discretization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Number of k-space modes per band.
    pub n_modes: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self { n_modes: 2048 }
    }
}

/// One atom: coupling-point positions in units of λ_m and drive settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub x1_lambda: f64,
    pub x2_lambda: f64,
    /// First-sideband drive amplitude.
    pub a1: f64,
    /// Modulation phase difference (rad); omit to use the chiral optimum.
    pub phi_c: Option<f64>,
}

/// Sweep section for `sweep --config`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Detunings δ₀ in GHz for the spectral-weight sweep.
    pub delta0_ghz: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { delta0_ghz: vec![-0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2] }
    }
}

/// Top-level run configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub waveguide: WaveguideConfig,
    pub numerics: NumericsConfig,
    #[serde(rename = "atoms")]
    pub atoms: Vec<AtomConfig>,
    pub sweep: SweepConfig,
    /// Modulation frequency in GHz.
    pub omega_d_ghz: f64,
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<Self, Error> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, Error> {
        Self::from_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.waveguide.to_params().validate()?;
        if self.numerics.n_modes < 16 || self.numerics.n_modes % 2 != 0 {
            return Err(Error::Config("numerics.n_modes must be even and ≥ 16".into()));
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if a.x2_lambda <= a.x1_lambda {
                return Err(Error::Config(format!("atom {i}: x2_lambda must exceed x1_lambda")));
            }
            if !(a.a1 > 0.0 && a.a1 <= 1.0) {
                return Err(Error::Config(format!("atom {i}: a1 must lie in (0, 1]")));
            }
        }
        if self.omega_d_ghz != 0.0 && !(0.05..=1.0).contains(&self.omega_d_ghz) {
            return Err(Error::Config("omega_d_ghz must lie in [0.05, 1.0]".into()));
        }
        Ok(())
    }
}
