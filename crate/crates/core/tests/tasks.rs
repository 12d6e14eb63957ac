use fmelm::tasks::{nlc_sequence, split, NlcConfig, SnrReference, SplitPlan, NLC_WINDOW};
use proptest::prelude::*;

const TAPS: [f64; 10] = [0.08, -0.12, 1.0, 0.18, -0.1, 0.091, -0.05, 0.04, 0.03, 0.01];

fn channel_output(u: &[f64], t: usize) -> f64 {
    let q: f64 = (0..10).map(|j| TAPS[j] * u[t + 2 - j]).sum();
    q + 0.036 * q * q - 0.011 * q * q * q
}

fn variance(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count() as f64;
    let mean = v.clone().sum::<f64>() / n;
    v.map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

fn realized_snr_db(cfg: &NlcConfig) -> f64 {
    let s = nlc_sequence(cfg).unwrap();
    let signal = s.clean.iter().map(|x| x * x).sum::<f64>() / s.clean.len() as f64;
    let noise = variance(s.received.iter().zip(&s.clean).map(|(r, c)| r - c));
    10.0 * (signal / noise).log10()
}

#[test]
fn realized_snr_matches_request() {
    let snr = realized_snr_db(&NlcConfig::new(10_000, Some(12.0), 3));
    assert!((snr - 12.0).abs() <= 0.5, "{snr}");
    let long = realized_snr_db(&NlcConfig::new(20_000, Some(12.0), 3));
    assert!((long - 12.0).abs() <= 0.5, "{long}");
}

#[test]
fn six_db_quadruples_noise() {
    let noise_var = |snr| {
        let s = nlc_sequence(&NlcConfig::new(50_000, Some(snr), 8)).unwrap();
        variance(s.received.iter().zip(&s.clean).map(|(r, c)| r - c))
    };
    let ratio = noise_var(12.0) / noise_var(18.0);
    let want = 10f64.powf(0.6);
    assert!((ratio / want - 1.0).abs() <= 0.05, "{ratio}");
}

#[test]
fn pre_nonlinearity_reference_uses_linear_power() {
    let mut cfg = NlcConfig::new(5000, Some(20.0), 4);
    cfg.reference = SnrReference::PreNonlinearity;
    let s = nlc_sequence(&cfg).unwrap();
    let p = s.q.iter().map(|x| x * x).sum::<f64>() / s.q.len() as f64;
    assert!((s.noise_variance - p / 100.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn window_features_recompute_exactly(seed in any::<u64>(), n in 20usize..400) {
        let cfg = NlcConfig::new(n, None, seed);
        let s = nlc_sequence(&cfg).unwrap();
        let data = s.to_dataset();
        prop_assert_eq!(data.len(), n - 18);
        for (row, t) in s.sample_times().enumerate() {
            prop_assert_eq!(data.targets.get(row, 0), s.symbols[t]);
            for (j, tau) in (t - 7..=t + 2).enumerate() {
                prop_assert_eq!(data.features.get(row, j).to_bits(), channel_output(&s.symbols, tau).to_bits());
            }
        }
        prop_assert_eq!(data.features.ncols(), NLC_WINDOW);
    }

    #[test]
    fn noisy_window_reads_received_sequence(seed in any::<u64>()) {
        let s = nlc_sequence(&NlcConfig::new(100, Some(10.0), seed)).unwrap();
        let data = s.to_dataset();
        for (row, t) in s.sample_times().enumerate() {
            for (j, tau) in (t - 7..=t + 2).enumerate() {
                prop_assert_eq!(data.features.get(row, j), s.x(tau));
            }
        }
    }

    #[test]
    fn split_partitions_indices(n in 2usize..300, seed in any::<u64>(), repeat in 0usize..50, f in 0.05f64..0.95) {
        let plan = SplitPlan { train_fraction: f, seed, n_repeats: 50 };
        prop_assume!(plan.validate().is_ok());
        let (train, test) = split(n, &plan, repeat);
        prop_assert_eq!(train.len(), plan.train_len(n));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }
}
