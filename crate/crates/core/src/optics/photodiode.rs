use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{CombState, FilterShape};

/// Additive Gaussian dark noise on a photodiode reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkNoise {
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotodiodeReading {
    pub intensity: f64,
    pub dark_noise_sigma: f64,
}

/// Optical power integrated over the whole filtered spectrum,
/// `I = Σ_k |E_k sqrt(F_k)|²`, plus one dark-noise draw when configured.
///
/// Noisy readings are clamped at zero.
pub fn total_intensity(comb: &CombState, filter: &FilterShape, noise: Option<DarkNoise>) -> PhotodiodeReading {
    let clean: f64 = comb
        .lines()
        .map(|(k, a)| a.norm_sqr() * filter.at(k).power_factor())
        .sum();
    match noise {
        Some(n) if n.sigma > 0.0 => PhotodiodeReading {
            intensity: (clean + gaussian(n)).max(0.0),
            dark_noise_sigma: n.sigma,
        },
        _ => PhotodiodeReading {
            intensity: clean,
            dark_noise_sigma: 0.0,
        },
    }
}

/// One zero-mean Gaussian draw with the given spread and seed.
fn gaussian(noise: DarkNoise) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    Normal::new(0.0, noise.sigma)
        .map(|d| d.sample(&mut rng))
        .unwrap_or(0.0)
}
