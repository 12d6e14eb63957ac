//! Cross-validated benchmark runs and hyperparameter sweeps.

mod benchmark;
mod record;
mod sweep;

pub use benchmark::{
    perceptron_baseline, perceptron_baseline_on, run_benchmark, run_benchmark_on, BenchmarkResult, LambdaMetrics,
    RepeatRecord, TaskSource,
};
pub use record::{benchmark_record, sweep_record, FORMAT_VERSION};
pub use sweep::{run_sweep, run_sweep_on, CellMetrics, SweepCell, SweepGrid, SweepResult, MAX_SWEEP_CELLS};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::elm::{ElmError, InputScale, WeightMapping};
use crate::optics::{ModulatorConfig, OpticsError, FITTED_EPSILON, FITTED_PHI, REFERENCE_M1, REFERENCE_M2};
use crate::tasks::{SnrReference, SplitPlan, TaskError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid run config: {0}")]
    Config(String),
    #[error("repeat {repeat} failed")]
    Repeat {
        repeat: usize,
        #[source]
        source: Box<ExperimentError>,
    },
    #[error("sweep has {0} cells, limit is {MAX_SWEEP_CELLS}")]
    TooManyCells(usize),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Elm(#[from] ElmError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskId {
    Iris,
    Wine,
    Banknote,
    Nlc,
}

impl TaskId {
    pub const ALL: [TaskId; 4] = [TaskId::Iris, TaskId::Wine, TaskId::Banknote, TaskId::Nlc];

    pub fn name(&self) -> &'static str {
        match self {
            TaskId::Iris => "iris",
            TaskId::Wine => "wine",
            TaskId::Banknote => "banknote",
            TaskId::Nlc => "nlc",
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown task {s:?}; expected one of iris, wine, banknote, nlc"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingMode {
    /// `y = h·W` computed from measured hidden powers.
    Digital,
    /// Weights applied by two readout filters and photodiodes.
    Optical,
}

/// Where the optical output coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CSource {
    /// Least squares on the first tenth of the test acquisitions.
    Learned,
    /// Closed form from the weights; needs the power-linear mapping.
    FromWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlcSettings {
    pub symbols: usize,
    pub snr_db: Option<f64>,
    pub reference: SnrReference,
}

impl Default for NlcSettings {
    fn default() -> Self {
        Self {
            symbols: 1000,
            snr_db: None,
            reference: SnrReference::PostNonlinearity,
        }
    }
}

/// Photodiode dark-noise standard deviations, in units of `E0²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSettings {
    /// Applied to every hidden-node reading.
    pub hidden_sigma: f64,
    /// Applied to each optical-weighting photodiode.
    pub readout_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: TaskId,
    /// Dataset file replacing the bundled one.
    pub data_path: Option<PathBuf>,
    /// Feature columns expected in a user-supplied banknote file.
    pub banknote_features: usize,
    pub d: usize,
    pub input_scale: InputScale,
    pub m1: f64,
    pub m2: f64,
    pub epsilon: f64,
    pub phi: f64,
    pub lambdas: Vec<f64>,
    pub mode: WeightingMode,
    pub mapping: WeightMapping,
    pub c_source: CSource,
    pub train_fraction: f64,
    pub repeats: usize,
    pub seed: u64,
    pub nlc: NlcSettings,
    pub noise: NoiseSettings,
}

impl RunConfig {
    /// Reference operating point with the per-task `d` and `λ` used in the
    /// benchmarks; 100 repeats for digital runs, 10 for optical ones.
    pub fn for_task(task: TaskId, mode: WeightingMode) -> Self {
        let (d, lambda) = match task {
            TaskId::Iris => (3, 1e-7),
            TaskId::Wine => (1, 1e-6),
            TaskId::Banknote => (1, 1e-5),
            TaskId::Nlc => (2, 1e-9),
        };
        Self {
            task,
            data_path: None,
            banknote_features: crate::tasks::BANKNOTE_PAPER_FEATURES,
            d,
            input_scale: InputScale::Db,
            m1: REFERENCE_M1,
            m2: REFERENCE_M2,
            epsilon: FITTED_EPSILON,
            phi: FITTED_PHI,
            lambdas: vec![lambda],
            mode,
            mapping: WeightMapping::DbLinear,
            c_source: CSource::Learned,
            train_fraction: 0.7,
            repeats: match mode {
                WeightingMode::Digital => 100,
                WeightingMode::Optical => 10,
            },
            seed: 1,
            nlc: NlcSettings::default(),
            noise: NoiseSettings::default(),
        }
    }

    pub fn pm1(&self) -> Result<ModulatorConfig, ExperimentError> {
        Ok(ModulatorConfig::new(self.m1, self.epsilon, self.phi)?)
    }

    pub fn pm2(&self) -> Result<ModulatorConfig, ExperimentError> {
        Ok(ModulatorConfig::pure(self.m2)?)
    }

    pub fn split_plan(&self) -> SplitPlan {
        SplitPlan {
            train_fraction: self.train_fraction,
            seed: self.seed,
            n_repeats: self.repeats,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.lambdas.is_empty() {
            return bad("lambda grid is empty".into());
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return bad(format!("lambda {l} must be finite and non-negative"));
        }
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        for (name, s) in [("hidden", self.noise.hidden_sigma), ("readout", self.noise.readout_sigma)] {
            if !(s.is_finite() && s >= 0.0) {
                return bad(format!("{name} noise sigma {s} must be finite and non-negative"));
            }
        }
        if self.mode == WeightingMode::Optical
            && self.c_source == CSource::FromWeights
            && self.mapping != WeightMapping::PowerLinear
        {
            return bad("coefficients from weights need the power-linear mapping".into());
        }
        self.split_plan().validate()?;
        self.pm1()?;
        self.pm2()?;
        Ok(())
    }

    /// Stable text form of every field, the input of [`Self::hash`].
    pub fn canonical(&self) -> String {
        format!("{self:?}")
    }

    /// SHA-256 of [`Self::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        hex_digest(self.canonical().as_bytes())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_round_trip() {
        for t in TaskId::ALL {
            assert_eq!(t.name().parse::<TaskId>().unwrap(), t);
        }
        assert!("mnist".parse::<TaskId>().is_err());
    }

    #[test]
    fn validation() {
        let ok = RunConfig::for_task(TaskId::Iris, WeightingMode::Digital);
        assert!(ok.validate().is_ok());
        assert_eq!(ok.repeats, 100);
        assert_eq!(RunConfig::for_task(TaskId::Iris, WeightingMode::Optical).repeats, 10);
        for broken in [
            RunConfig { lambdas: vec![], ..ok.clone() },
            RunConfig { lambdas: vec![-1.0], ..ok.clone() },
            RunConfig { d: 0, ..ok.clone() },
            RunConfig { m1: 13.0, ..ok.clone() },
            RunConfig { train_fraction: 1.0, ..ok.clone() },
            RunConfig {
                mode: WeightingMode::Optical,
                c_source: CSource::FromWeights,
                ..ok.clone()
            },
        ] {
            assert!(broken.validate().is_err(), "{broken:?}");
        }
    }

    #[test]
    fn hash_tracks_every_field() {
        let a = RunConfig::for_task(TaskId::Wine, WeightingMode::Digital);
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), RunConfig { seed: 2, ..a.clone() }.hash());
        assert_ne!(a.hash(), RunConfig { m2: 2.1800001, ..a.clone() }.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
