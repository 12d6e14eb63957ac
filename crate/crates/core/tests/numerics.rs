mod common;

use fmelm::numerics::{bessel_j, ols_solve, ridge_solve, RealMatrix};
use proptest::prelude::*;

#[test]
fn ridge_matches_normal_equations() {
    for seed in 0..50 {
        let h = common::random_matrix(20, 5, seed);
        let y = common::random_matrix(20, 2, 1000 + seed);
        for lambda in [0.1, 1e-3, 2.0] {
            let w = ridge_solve(&h, &y, lambda).unwrap();
            let want = common::normal_equation_ridge(&h, &y, lambda);
            for (i, row) in want.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert!((w.get(i, j) - v).abs() < 1e-8, "seed {seed} lambda {lambda}");
                }
            }
        }
    }
}

#[test]
fn zero_penalty_is_least_squares() {
    for seed in 0..20 {
        let h = common::random_matrix(15, 6, seed);
        let y = common::random_matrix(15, 3, 500 + seed);
        let a = ridge_solve(&h, &y, 0.0).unwrap();
        let b = ols_solve(&h, &y).unwrap();
        let want = common::normal_equation_ridge(&h, &y, 0.0);
        for i in 0..6 {
            for j in 0..3 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-10);
                assert!((a.get(i, j) - want[i][j]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn silent_column_barely_moves_predictions() {
    let h = common::random_matrix(40, 8, 3);
    let y = common::random_matrix(40, 2, 4);
    let noise = common::random_matrix(40, 1, 5);
    let mut wide = Vec::new();
    for r in 0..40 {
        wide.extend_from_slice(h.row(r));
        wide.push(noise.get(r, 0) * 1e-12);
    }
    let wide = RealMatrix::new(40, 9, wide).unwrap();
    let lambda = 1e-7;
    let p0 = h.matmul(&ridge_solve(&h, &y, lambda).unwrap()).unwrap();
    let p1 = wide.matmul(&ridge_solve(&wide, &y, lambda).unwrap()).unwrap();
    for (a, b) in p0.as_slice().iter().zip(p1.as_slice()) {
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn bessel_squares_sum_to_one() {
    for x in [0.5f64, 2.18, 7.87, 12.0, 30.0] {
        let k_max = x.ceil() as i32 + 40;
        let s: f64 = (-k_max..=k_max).map(|k| bessel_j(k, x).unwrap().powi(2)).sum();
        assert!((s - 1.0).abs() <= 1e-12, "x={x}: {s}");
    }
}

proptest! {
    #[test]
    fn weight_norm_shrinks_with_penalty(seed in 0u64..10_000, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let (l1, l2) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(l1 < l2);
        let h = common::random_matrix(12, 4, seed);
        let y = common::random_matrix(12, 2, seed + 1);
        let n1 = ridge_solve(&h, &y, l1).unwrap().norm();
        let n2 = ridge_solve(&h, &y, l2).unwrap().norm();
        prop_assert!(n1 >= n2 * (1.0 - 1e-12), "{n1} < {n2}");
    }
}
