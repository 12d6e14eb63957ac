use rayon::prelude::*;

use super::{hex_digest, run_benchmark_on, ExperimentError, RunConfig, TaskSource};
use crate::tasks::{Distribution, ScoreKind};

/// Largest number of grid cells a single sweep may evaluate.
pub const MAX_SWEEP_CELLS: usize = 2500;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub d: Vec<usize>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
}

impl SweepGrid {
    /// A one-cell grid at the operating point of `cfg`.
    pub fn single(cfg: &RunConfig) -> Self {
        Self {
            d: vec![cfg.d],
            m1: vec![cfg.m1],
            m2: vec![cfg.m2],
        }
    }

    pub fn len(&self) -> usize {
        self.d.len() * self.m1.len() * self.m2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells in `d`, then `m1`, then `m2` order.
    pub fn cells(&self) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &d in &self.d {
            for &m1 in &self.m1 {
                for &m2 in &self.m2 {
                    out.push((d, m1, m2));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellMetrics {
    pub selected_lambda: f64,
    pub summary: Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub d: usize,
    pub m1: f64,
    pub m2: f64,
    /// A failing cell keeps its error message; the sweep goes on.
    pub outcome: Result<CellMetrics, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub kind: ScoreKind,
    pub cells: Vec<SweepCell>,
    pub config_hash: String,
    pub seed: u64,
}

/// Runs the benchmark on every cell of `grid`. All cells use the master seed
/// of `base`, so they share splits, symbol streams and noise draws.
pub fn run_sweep(base: &RunConfig, grid: &SweepGrid) -> Result<SweepResult, ExperimentError> {
    run_sweep_on(base, grid, &TaskSource::load(base)?)
}

pub fn run_sweep_on(base: &RunConfig, grid: &SweepGrid, source: &TaskSource) -> Result<SweepResult, ExperimentError> {
    if grid.len() > MAX_SWEEP_CELLS {
        return Err(ExperimentError::TooManyCells(grid.len()));
    }
    if grid.is_empty() {
        return Err(ExperimentError::Config("sweep grid is empty".into()));
    }
    let cells = grid
        .cells()
        .into_par_iter()
        .map(|(d, m1, m2)| {
            let cfg = RunConfig { d, m1, m2, ..base.clone() };
            let outcome = cfg
                .validate()
                .and_then(|_| run_benchmark_on(&cfg, source))
                .map(|r| CellMetrics {
                    selected_lambda: r.selected_lambda,
                    summary: r.metrics.summary,
                })
                .map_err(|e| {
                    log::warn!("sweep cell d={d} m1={m1} m2={m2} failed: {e}");
                    e.to_string()
                });
            SweepCell { d, m1, m2, outcome }
        })
        .collect();
    Ok(SweepResult {
        grid: grid.clone(),
        kind: source.score_kind(),
        cells,
        config_hash: hex_digest(format!("{}{grid:?}", base.canonical()).as_bytes()),
        seed: base.seed,
    })
}
