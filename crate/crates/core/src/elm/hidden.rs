use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::{ElmError, HIDDEN_HALF_WIDTH, HIDDEN_NODES};
use crate::numerics::RealMatrix;
use crate::optics::{
    apply_filter, generate_comb, line_power, mixing_kernel, phase_modulate, CombState, DarkNoise, FilterShape,
    ModulatorConfig, OpticsError,
};
use crate::seed::mix;

/// Powers of the 31 central lines for every sample, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenMatrix(RealMatrix);

impl HiddenMatrix {
    pub fn new(m: RealMatrix) -> Result<Self, ElmError> {
        if m.ncols() != HIDDEN_NODES {
            return Err(ElmError::Dimension(format!(
                "hidden matrix needs {HIDDEN_NODES} columns, got {}",
                m.ncols()
            )));
        }
        if m.as_slice().iter().any(|&v| v < 0.0) {
            return Err(ElmError::Dimension("hidden powers must be non-negative".into()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self(self.0.select_rows(idx))
    }
}

fn window() -> impl Iterator<Item = i32> {
    -HIDDEN_HALF_WIDTH..=HIDDEN_HALF_WIDTH
}

/// Hidden-layer powers for one encoded input, through the full optical chain:
/// comb generation, input filter, mixing modulator, notch readout of
/// `k = -15 ..= 15`.
pub fn forward(
    input_filter: &FilterShape,
    pm1: &ModulatorConfig,
    pm2: &ModulatorConfig,
    e0: f64,
) -> Result<Vec<f64>, ElmError> {
    let comb = generate_comb(e0, pm1)?;
    let hidden = phase_modulate(&apply_filter(&comb, input_filter), pm2)?;
    Ok(window().map(|k| line_power(&hidden, k)).collect())
}

/// Fixed optical chain with the comb and mixing kernel computed once.
#[derive(Debug, Clone)]
pub struct PhotonicElm {
    comb: CombState,
    pm2: ModulatorConfig,
    kernel_support: i64,
    kernel: Vec<Complex64>,
}

impl PhotonicElm {
    pub fn new(e0: f64, pm1: &ModulatorConfig, pm2: &ModulatorConfig) -> Result<Self, ElmError> {
        pm2.validate()?;
        if pm2.epsilon != 0.0 {
            return Err(OpticsError::UnsupportedSecondHarmonic(pm2.epsilon).into());
        }
        let comb = generate_comb(e0, pm1)?;
        let (kernel_support, kernel) = mixing_kernel(pm2);
        Ok(Self {
            comb,
            pm2: *pm2,
            kernel_support,
            kernel,
        })
    }

    /// The unencoded comb leaving the first modulator.
    pub fn comb(&self) -> &CombState {
        &self.comb
    }

    pub fn input_field(&self, filter: &FilterShape) -> CombState {
        apply_filter(&self.comb, filter)
    }

    /// Full mixed comb for one input filter.
    pub fn hidden_field(&self, filter: &FilterShape) -> Result<CombState, ElmError> {
        Ok(phase_modulate(&self.input_field(filter), &self.pm2)?)
    }

    /// Hidden-node powers, evaluating the mixing only on the read window.
    pub fn hidden_powers(&self, filter: &FilterShape) -> Vec<f64> {
        let input = self.input_field(filter);
        let zero = Complex64::new(0.0, 0.0);
        let support = self.kernel_support;
        window()
            .map(|k| {
                let mut acc = zero;
                for (p, e) in input.lines() {
                    let j = (k - p) as i64;
                    if e == zero || j.abs() > support {
                        continue;
                    }
                    acc += e * self.kernel[(j + support) as usize];
                }
                acc.norm_sqr()
            })
            .collect()
    }

    /// Powers of the encoded input comb on the same window, as seen without
    /// the mixing modulator.
    pub fn input_powers(&self, filter: &FilterShape) -> Vec<f64> {
        let input = self.input_field(filter);
        window().map(|k| line_power(&input, k)).collect()
    }
}

/// Builds `H` row by row from per-sample input filters. Rows are computed in
/// parallel and kept in input order. With dark noise each entry is one noisy
/// photodiode reading, seeded from `noise.seed` and the entry position.
pub fn build_hidden_matrix(
    filters: &[FilterShape],
    elm: &PhotonicElm,
    noise: Option<DarkNoise>,
) -> Result<HiddenMatrix, ElmError> {
    assemble(filters, noise, |f| elm.hidden_powers(f))
}

/// Same as [`build_hidden_matrix`] with the mixing modulator bypassed.
pub fn build_input_matrix(
    filters: &[FilterShape],
    elm: &PhotonicElm,
    noise: Option<DarkNoise>,
) -> Result<HiddenMatrix, ElmError> {
    assemble(filters, noise, |f| elm.input_powers(f))
}

fn assemble(
    filters: &[FilterShape],
    noise: Option<DarkNoise>,
    read: impl Fn(&FilterShape) -> Vec<f64> + Sync,
) -> Result<HiddenMatrix, ElmError> {
    let rows: Vec<Vec<f64>> = filters
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut row = read(f);
            if let Some(n) = noise.filter(|n| n.sigma > 0.0) {
                add_dark_noise(&mut row, n, i as u64);
            }
            row
        })
        .collect();
    let data = rows.concat();
    HiddenMatrix::new(RealMatrix::new(filters.len(), HIDDEN_NODES, data)?)
}

fn add_dark_noise(row: &mut [f64], noise: DarkNoise, row_index: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(noise.seed, row_index));
    let dist = Normal::new(0.0, noise.sigma).expect("positive finite sigma");
    for v in row.iter_mut() {
        *v = (*v + dist.sample(&mut rng)).max(0.0);
    }
}
