//! Spectral-domain model of the optical chain: comb generation, programmable
//! filters, frequency mixing and photodiode readout.

mod comb;
mod filter;
mod photodiode;

pub use comb::{
    comb_spectrum_text, generate_comb, line_power, phase_modulate, CombState, DEFAULT_BASE_FREQUENCY_HZ,
    DEFAULT_LINE_SPACING_HZ,
};
pub(crate) use comb::mixing_kernel;
pub use filter::{apply_filter, FilterShape, LineAttenuation, MIN_ATTENUATION_DB};
pub use photodiode::{total_intensity, DarkNoise, PhotodiodeReading};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported modulation index.
pub const MAX_MODULATION_INDEX: f64 = 12.0;
/// Default trimming threshold for comb lines, relative to the field scale.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;

/// Second-harmonic strength fitted to the measured comb.
pub const FITTED_EPSILON: f64 = 0.0471;
/// Second-harmonic phase fitted to the measured comb, radians.
pub const FITTED_PHI: f64 = 1.31;
/// Modulation index of the comb-generating modulator in the reference setup.
pub const REFERENCE_M1: f64 = 7.87;
/// Modulation index of the mixing modulator in the reference setup.
pub const REFERENCE_M2: f64 = 2.18;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("modulation index {0} outside [0, 12]")]
    InvalidModulationIndex(f64),
    #[error("second-harmonic strength {0} must be finite and non-negative")]
    InvalidEpsilon(f64),
    #[error("second-harmonic phase {0} must be finite")]
    InvalidPhase(f64),
    #[error("truncation tolerance {0} outside (0, 1e-6]")]
    InvalidTruncation(f64),
    #[error("input field amplitude must be positive and finite, got {0}")]
    InvalidField(f64),
    #[error("second-harmonic correction on the mixing modulator is not supported (epsilon = {0})")]
    UnsupportedSecondHarmonic(f64),
    #[error("invalid setting {setting:?} on line {k}")]
    InvalidAttenuation { k: i32, setting: LineAttenuation },
    #[error("comb has no lines")]
    EmptyComb,
    #[error("comb amplitude is not finite")]
    NonFinite,
}

/// Drive of one phase modulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulatorConfig {
    /// Modulation index `πV/V_π`.
    pub m: f64,
    /// Relative strength of the second RF harmonic.
    pub epsilon: f64,
    /// Phase of the second RF harmonic, radians.
    pub phi: f64,
    pub truncation_tol: f64,
}

impl ModulatorConfig {
    pub fn new(m: f64, epsilon: f64, phi: f64) -> Result<Self, OpticsError> {
        let cfg = Self {
            m,
            epsilon,
            phi,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Pure phase modulation, no second harmonic.
    pub fn pure(m: f64) -> Result<Self, OpticsError> {
        Self::new(m, 0.0, 0.0)
    }

    pub fn with_truncation_tol(mut self, tol: f64) -> Result<Self, OpticsError> {
        self.truncation_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), OpticsError> {
        if !(0.0..=MAX_MODULATION_INDEX).contains(&self.m) {
            return Err(OpticsError::InvalidModulationIndex(self.m));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(OpticsError::InvalidEpsilon(self.epsilon));
        }
        if !self.phi.is_finite() {
            return Err(OpticsError::InvalidPhase(self.phi));
        }
        if !(self.truncation_tol > 0.0 && self.truncation_tol <= 1e-6) {
            return Err(OpticsError::InvalidTruncation(self.truncation_tol));
        }
        Ok(())
    }
}
