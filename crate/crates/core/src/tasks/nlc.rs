use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{TaskDataset, TaskError};
use crate::elm::{TaskKind, NLC_SYMBOLS};
use crate::numerics::RealMatrix;
use crate::seed::{derive, stream};

/// Channel taps on `u(t+2), u(t+1), ..., u(t-7)`.
const TAPS: [f64; 10] = [0.08, -0.12, 1.0, 0.18, -0.1, 0.091, -0.05, 0.04, 0.03, 0.01];
const LEAD: usize = 2;
const LAG: usize = 7;

/// Number of channel outputs per sample, `x(t-7) ..= x(t+2)`.
pub const NLC_WINDOW: usize = LAG + 1 + LEAD;

/// Which signal the noise power is referenced to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrReference {
    /// Linear channel output `q`.
    PreNonlinearity,
    /// Noiseless channel output `x`.
    #[default]
    PostNonlinearity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlcConfig {
    pub n_symbols: usize,
    /// `None` disables the noise.
    pub snr_db: Option<f64>,
    pub seed: u64,
    #[serde(default)]
    pub reference: SnrReference,
}

impl NlcConfig {
    pub fn new(n_symbols: usize, snr_db: Option<f64>, seed: u64) -> Self {
        Self {
            n_symbols,
            snr_db,
            seed,
            reference: SnrReference::default(),
        }
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        if self.n_symbols < 20 {
            return Err(TaskError::InvalidNlc(format!(
                "need at least 20 symbols, got {}",
                self.n_symbols
            )));
        }
        if let Some(s) = self.snr_db {
            if !(0.0..=60.0).contains(&s) {
                return Err(TaskError::InvalidNlc(format!("snr {s} dB outside [0, 60]")));
            }
        }
        Ok(())
    }
}

/// A transmitted symbol stream and the channel output it produced.
///
/// `q`, `clean` and `received` are indexed from `t = 7` to `t = n - 3`; the
/// outermost symbols have no complete channel memory.
#[derive(Debug, Clone, PartialEq)]
pub struct NlcSequence {
    pub symbols: Vec<f64>,
    pub q: Vec<f64>,
    pub clean: Vec<f64>,
    pub received: Vec<f64>,
    pub noise_variance: f64,
}

fn linear_channel(u: &[f64], t: usize) -> f64 {
    TAPS.iter()
        .enumerate()
        .map(|(j, c)| c * u[t + LEAD - j])
        .sum()
}

fn nonlinearity(q: f64) -> f64 {
    q + 0.036 * q * q - 0.011 * q * q * q
}

fn mean_power(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64
}

/// Passes `symbols` through the channel. `noise_seed` keys the Gaussian
/// noise stream.
pub fn nlc_from_symbols(
    symbols: &[f64],
    snr_db: Option<f64>,
    reference: SnrReference,
    noise_seed: u64,
) -> Result<NlcSequence, TaskError> {
    NlcConfig {
        n_symbols: symbols.len(),
        snr_db,
        seed: 0,
        reference,
    }
    .validate()?;
    let n = symbols.len();
    let q: Vec<f64> = (LAG..n - LEAD).map(|t| linear_channel(symbols, t)).collect();
    let clean: Vec<f64> = q.iter().map(|&v| nonlinearity(v)).collect();
    let noise_variance = match snr_db {
        None => 0.0,
        Some(snr) => {
            let p = match reference {
                SnrReference::PreNonlinearity => mean_power(&q),
                SnrReference::PostNonlinearity => mean_power(&clean),
            };
            p / 10f64.powf(snr / 10.0)
        }
    };
    let received = if noise_variance > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        let dist = Normal::new(0.0, noise_variance.sqrt()).expect("finite variance");
        clean.iter().map(|&x| x + dist.sample(&mut rng)).collect()
    } else {
        clean.clone()
    };
    Ok(NlcSequence {
        symbols: symbols.to_vec(),
        q,
        clean,
        received,
        noise_variance,
    })
}

/// Draws symbols and noise from `cfg.seed` and builds the equalization task.
pub fn nlc_generate(cfg: &NlcConfig) -> Result<TaskDataset, TaskError> {
    Ok(nlc_sequence(cfg)?.to_dataset())
}

/// Same draw as [`nlc_generate`], keeping the raw sequence.
pub fn nlc_sequence(cfg: &NlcConfig) -> Result<NlcSequence, TaskError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive(cfg.seed, stream::NLC_SYMBOLS, 0));
    let symbols: Vec<f64> = (0..cfg.n_symbols)
        .map(|_| *NLC_SYMBOLS.choose(&mut rng).expect("non-empty"))
        .collect();
    nlc_from_symbols(&symbols, cfg.snr_db, cfg.reference, derive(cfg.seed, stream::NLC_NOISE, 0))
}

impl NlcSequence {
    /// Channel output at absolute time `t`.
    pub fn x(&self, t: usize) -> f64 {
        self.received[t - LAG]
    }

    /// Times `t` for which a full window of received values exists.
    pub fn sample_times(&self) -> std::ops::RangeInclusive<usize> {
        2 * LAG..=self.symbols.len() - 1 - 2 * LEAD
    }

    /// One sample per time in [`Self::sample_times`], features
    /// `x(t-7) ..= x(t+2)` and target `u(t)`.
    pub fn to_dataset(&self) -> TaskDataset {
        let times = self.sample_times();
        let rows = times.clone().count();
        let mut features = Vec::with_capacity(rows * NLC_WINDOW);
        let mut targets = Vec::with_capacity(rows);
        for t in times {
            features.extend((t - LAG..=t + LEAD).map(|s| self.x(s)));
            targets.push(self.symbols[t]);
        }
        TaskDataset {
            name: "nlc".into(),
            features: RealMatrix::new(rows, NLC_WINDOW, features).expect("window shape"),
            targets: RealMatrix::new(rows, 1, targets).expect("target shape"),
            kind: TaskKind::SymbolSnap,
            labels: NLC_SYMBOLS.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Text export with one `t u x` line per received value.
    pub fn export_text(&self) -> String {
        let mut out = String::from("# t\tu\tx\n");
        for (i, x) in self.received.iter().enumerate() {
            let t = i + LAG;
            out.push_str(&format!("{t}\t{}\t{x:.17e}\n", self.symbols[t]));
        }
        out
    }
}
