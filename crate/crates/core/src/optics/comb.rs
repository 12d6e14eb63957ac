use std::fmt::Write as _;

use num_complex::Complex64;

use super::{ModulatorConfig, OpticsError};
use crate::numerics::{bessel_j_symmetric, bessel_support};

/// Complex spectral amplitudes `E_k` of a comb for consecutive line offsets
/// `k = center_offset, center_offset + 1, ...`.
///
/// Line `k` sits at optical frequency `ω + kΩ`. The two frequencies are
/// carried for bookkeeping only; every computation is index based.
#[derive(Debug, Clone, PartialEq)]
pub struct CombState {
    center_offset: i32,
    amplitudes: Vec<Complex64>,
    pub base_frequency: f64,
    pub line_spacing: f64,
}

/// RF drive frequency of the modulators, used as the default line spacing.
pub const DEFAULT_LINE_SPACING_HZ: f64 = 16.968_60e9;
/// Nominal C-band carrier.
pub const DEFAULT_BASE_FREQUENCY_HZ: f64 = 193.4e12;

impl CombState {
    pub fn new(center_offset: i32, amplitudes: Vec<Complex64>) -> Result<Self, OpticsError> {
        if amplitudes.is_empty() {
            return Err(OpticsError::EmptyComb);
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(OpticsError::NonFinite);
        }
        Ok(Self {
            center_offset,
            amplitudes,
            base_frequency: DEFAULT_BASE_FREQUENCY_HZ,
            line_spacing: DEFAULT_LINE_SPACING_HZ,
        })
    }

    /// A single unmodulated line at `k = 0`.
    pub fn monochromatic(e0: f64) -> Self {
        Self::new(0, vec![Complex64::new(e0, 0.0)]).expect("one finite line")
    }

    /// Index `k` of the first stored line.
    pub fn center_offset(&self) -> i32 {
        self.center_offset
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Inclusive range of stored line offsets.
    pub fn k_range(&self) -> (i32, i32) {
        (
            self.center_offset,
            self.center_offset + self.amplitudes.len() as i32 - 1,
        )
    }

    /// Amplitude of line `k`, zero outside the stored range.
    pub fn amplitude(&self, k: i32) -> Complex64 {
        let idx = k as i64 - self.center_offset as i64;
        if idx < 0 || idx >= self.amplitudes.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[idx as usize]
        }
    }

    /// `Σ_k |E_k|²`.
    pub fn total_power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `(k, E_k)` pairs in increasing `k`.
    pub fn lines(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, &a)| (self.center_offset + i as i32, a))
    }

    pub(crate) fn with_amplitudes(&self, center_offset: i32, amplitudes: Vec<Complex64>) -> Self {
        Self {
            center_offset,
            amplitudes,
            base_frequency: self.base_frequency,
            line_spacing: self.line_spacing,
        }
    }

    /// Drops leading and trailing lines with `|E_k| <= threshold`, keeping at
    /// least one line.
    fn trimmed(mut self, threshold: f64) -> Self {
        let keep = |a: &Complex64| a.norm() > threshold;
        let Some(first) = self.amplitudes.iter().position(keep) else {
            return self;
        };
        let last = self.amplitudes.iter().rposition(keep).unwrap_or(first);
        self.amplitudes.truncate(last + 1);
        self.amplitudes.drain(..first);
        self.center_offset += first as i32;
        self
    }
}

/// `i^n` for any integer `n`.
pub(crate) fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Comb emitted by a phase modulator driven at `Ω` (plus its second harmonic)
/// acting on a monochromatic field of amplitude `e0`:
///
/// `E_k = e0 Σ_p i^{k−p} J_{k−2p}(m) J_p(εm) e^{−ipΦ}`.
///
/// With `ε = 0` only `p = 0` survives and `E_k = e0 i^k J_k(m)`. Lines whose
/// magnitude does not exceed `truncation_tol · e0` are trimmed from both ends.
pub fn generate_comb(e0: f64, config: &ModulatorConfig) -> Result<CombState, OpticsError> {
    config.validate()?;
    if !(e0 > 0.0 && e0.is_finite()) {
        return Err(OpticsError::InvalidField(e0));
    }
    let m = config.m;
    let harmonic = config.epsilon * m;
    // inner tolerance well below the trim threshold so the discarded tails
    // cannot accumulate into the kept lines
    let inner_tol = config.truncation_tol * 1e-4;
    let p_max = bessel_support(harmonic, inner_tol) as i64;
    let k_main = bessel_support(m, inner_tol) as i64;
    let k_max = k_main + 2 * p_max;
    let order_max = (k_max + 2 * p_max) as usize;

    let j_main = bessel_j_symmetric(order_max, m);
    let j_harm = bessel_j_symmetric(p_max as usize, harmonic);
    let harm_terms: Vec<(i64, Complex64)> = (-p_max..=p_max)
        .map(|p| {
            let w = j_harm[(p + p_max) as usize] * Complex64::from_polar(1.0, -(p as f64) * config.phi);
            (p, w)
        })
        .filter(|(_, w)| *w != Complex64::new(0.0, 0.0))
        .collect();

    let amplitudes: Vec<Complex64> = (-k_max..=k_max)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(p, w) in &harm_terms {
                let order = k - 2 * p;
                let j = j_main[(order + order_max as i64) as usize];
                acc += i_pow(k - p) * (j * w);
            }
            acc * e0
        })
        .collect();

    let comb = CombState::new(-k_max as i32, amplitudes)?;
    Ok(comb.trimmed(config.truncation_tol * e0))
}

/// Kernel `c_j = i^j J_j(m)` for `j = -K..=K`, returned with `K`.
pub(crate) fn mixing_kernel(config: &ModulatorConfig) -> (i64, Vec<Complex64>) {
    let support = bessel_support(config.m, config.truncation_tol * 1e-4) as i64;
    let table = bessel_j_symmetric(support as usize, config.m);
    let kernel = (-support..=support)
        .map(|j| i_pow(j) * table[(j + support) as usize])
        .collect();
    (support, kernel)
}

/// Frequency mixing by a phase modulator without second-harmonic content:
/// `E'_k = Σ_p E_p i^{k−p} J_{k−p}(m)`.
///
/// The output is widened by the kernel support, then lines at or below
/// `truncation_tol · sqrt(Σ|E_p|²)` are trimmed from both ends.
pub fn phase_modulate(comb: &CombState, config: &ModulatorConfig) -> Result<CombState, OpticsError> {
    config.validate()?;
    if config.epsilon != 0.0 {
        return Err(OpticsError::UnsupportedSecondHarmonic(config.epsilon));
    }
    let (support, kernel) = mixing_kernel(config);
    let out = convolve(comb.amplitudes(), &kernel);
    let scale = comb.total_power().sqrt();
    let mixed = comb.with_amplitudes(comb.center_offset - support as i32, out);
    if scale > 0.0 {
        Ok(mixed.trimmed(config.truncation_tol * scale))
    } else {
        Ok(mixed)
    }
}

fn convolve(signal: &[Complex64], kernel: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); signal.len() + kernel.len() - 1];
    for (p, &e) in signal.iter().enumerate() {
        if e == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, &c) in kernel.iter().enumerate() {
            out[p + j] += e * c;
        }
    }
    out
}

/// Power `|E_k|²` of a single line, as read through a notch filter.
pub fn line_power(comb: &CombState, k: i32) -> f64 {
    comb.amplitude(k).norm_sqr()
}

/// Two-column text dump of a comb: line offset and power in dB relative to
/// the strongest line. Lines with no power are written as -300 dB.
pub fn comb_spectrum_text(comb: &CombState) -> String {
    let peak = comb
        .amplitudes()
        .iter()
        .map(|a| a.norm_sqr())
        .fold(0.0, f64::max);
    let mut s = String::from("# k\tpower_db_rel_peak\n");
    for (k, a) in comb.lines() {
        let rel = if peak > 0.0 { a.norm_sqr() / peak } else { 0.0 };
        let db = if rel > 1e-30 { 10.0 * rel.log10() } else { -300.0 };
        let _ = writeln!(s, "{k}\t{db:.6}");
    }
    s
}
