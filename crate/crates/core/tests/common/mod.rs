//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use fmelm::numerics::RealMatrix;
use fmelm::optics::{CombState, FilterShape};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Samples per RF period for the time-domain oracles.
pub const SAMPLES: usize = 4096;

/// Line `k` of a comb sits on `e^{-ikθ}`, so coefficients come from the
/// unnormalized inverse transform divided by the sample count.
fn to_lines(mut field: Vec<Complex64>) -> Vec<Complex64> {
    let n = field.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut field);
    field.iter().map(|c| c / n as f64).collect()
}

fn to_time(lines: &[Complex64]) -> Vec<Complex64> {
    let n = lines.len();
    let mut buf = lines.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf
}

fn theta(n: usize) -> f64 {
    2.0 * PI * n as f64 / SAMPLES as f64
}

pub fn line(lines: &[Complex64], k: i32) -> Complex64 {
    lines[k.rem_euclid(lines.len() as i32) as usize]
}

/// Line amplitudes of `e0 exp(i m cos θ + i ε m cos(2θ + Φ))`.
pub fn comb_oracle(e0: f64, m: f64, epsilon: f64, phi: f64) -> Vec<Complex64> {
    let field = (0..SAMPLES)
        .map(|n| {
            let t = theta(n);
            let phase = m * t.cos() + epsilon * m * (2.0 * t + phi).cos();
            Complex64::from_polar(e0, phase)
        })
        .collect();
    to_lines(field)
}

fn spread(comb: &CombState) -> Vec<Complex64> {
    let mut lines = vec![Complex64::new(0.0, 0.0); SAMPLES];
    for (k, a) in comb.lines() {
        lines[k.rem_euclid(SAMPLES as i32) as usize] = a;
    }
    lines
}

/// Multiplies the time-domain field of `lines` by `exp(i m cos θ)`.
fn modulate_lines(lines: &[Complex64], m: f64) -> Vec<Complex64> {
    let field = to_time(lines)
        .into_iter()
        .enumerate()
        .map(|(n, e)| e * Complex64::from_polar(1.0, m * theta(n).cos()))
        .collect();
    to_lines(field)
}

pub fn modulate_oracle(comb: &CombState, m: f64) -> Vec<Complex64> {
    modulate_lines(&spread(comb), m)
}

/// Source comb, input filter and mixing modulator evaluated in one pass.
pub fn hidden_powers_oracle(m1: f64, epsilon: f64, phi: f64, filter: &FilterShape, m2: f64) -> Vec<f64> {
    let filtered: Vec<Complex64> = comb_oracle(1.0, m1, epsilon, phi)
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            let k = if i < SAMPLES / 2 { i as i32 } else { i as i32 - SAMPLES as i32 };
            a * filter.at(k).amplitude_factor()
        })
        .collect();
    let out = modulate_lines(&filtered, m2);
    (-15..=15).map(|k| line(&out, k).norm_sqr()).collect()
}

/// `(HᵀH + λ²I)⁻¹ HᵀY` by Gauss-Jordan elimination with partial pivoting.
pub fn normal_equation_ridge(h: &RealMatrix, y: &RealMatrix, lambda: f64) -> Vec<Vec<f64>> {
    let (n, p, q) = (h.nrows(), h.ncols(), y.ncols());
    let mut a = vec![vec![0.0; p + q]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = (0..n).map(|r| h.get(r, i) * h.get(r, j)).sum();
        }
        a[i][i] += lambda * lambda;
        for j in 0..q {
            a[i][p + j] = (0..n).map(|r| h.get(r, i) * y.get(r, j)).sum();
        }
    }
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&x, &z| a[x][col].abs().total_cmp(&a[z][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    a.into_iter().map(|row| row[p..].to_vec()).collect()
}

/// Seeded matrix with entries uniform in [-1, 1).
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> RealMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    RealMatrix::new(rows, cols, data).unwrap()
}
