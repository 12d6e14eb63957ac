//! Bessel functions of the first kind for integer order.
//!
//! Values come from Miller's backward recurrence
//! `J_{k-1}(x) = (2k/x) J_k(x) - J_{k+1}(x)`, started well above both the
//! requested order and `|x|`, and normalized with `J_0 + 2 Σ J_{2k} = 1`.

use super::NumericsError;

/// Largest order accepted by [`bessel_j`].
pub const MAX_ORDER: i32 = 200;
/// Largest `|x|` accepted by [`bessel_j`].
pub const MAX_ARGUMENT: f64 = 50.0;

const RESCALE_ABOVE: f64 = 1e250;

/// `J_order(x)` for `|order| ≤ 200` and `|x| ≤ 50`.
pub fn bessel_j(order: i32, x: f64) -> Result<f64, NumericsError> {
    check_envelope(order, x)?;
    let n = order.unsigned_abs() as usize;
    let table = bessel_j_table(n, x.abs());
    let mut v = table[n];
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x)
    if order < 0 && n % 2 == 1 {
        v = -v;
    }
    if x < 0.0 && n % 2 == 1 {
        v = -v;
    }
    Ok(v)
}

fn check_envelope(order: i32, x: f64) -> Result<(), NumericsError> {
    if order.unsigned_abs() > MAX_ORDER as u32 || !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(NumericsError::Domain { order, argument: x });
    }
    Ok(())
}

/// `J_0(x) ..= J_max_order(x)` for `x ≥ 0` in one recurrence pass.
///
/// The arguments are not range-checked; callers inside the crate stay in the
/// operating envelope.
pub fn bessel_j_table(max_order: usize, x: f64) -> Vec<f64> {
    debug_assert!(x >= 0.0 && x.is_finite());
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 1e-6 {
        // two-term power series; the next term is below 1e-25 relative
        let half = 0.5 * x;
        let mut lead = 1.0;
        for (n, v) in out.iter_mut().enumerate() {
            if n > 0 {
                lead *= half / n as f64;
            }
            *v = lead * (1.0 - half * half / (n as f64 + 1.0));
        }
        return out;
    }

    let reach = max_order.max(x.ceil() as usize);
    let mut start = reach + 30 + (60.0 * reach as f64).sqrt().ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        let idx = k - 1;
        if idx <= max_order {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut().skip(idx) {
                *v *= s;
            }
        }
    }
    norm += cur;
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// `J_{-max_order}(x) ..= J_{max_order}(x)` for any real `x`, index offset by
/// `max_order`.
pub fn bessel_j_symmetric(max_order: usize, x: f64) -> Vec<f64> {
    let table = bessel_j_table(max_order, x.abs());
    let mut out = vec![0.0; 2 * max_order + 1];
    for (n, &v) in table.iter().enumerate() {
        let odd = n % 2 == 1;
        let pos = if odd && x < 0.0 { -v } else { v };
        out[max_order + n] = pos;
        out[max_order - n] = if odd { -pos } else { pos };
    }
    out
}

/// Smallest order `n > |x|` past which every `|J_n(x)|` is below `tol`.
///
/// For orders above the argument the sequence decays monotonically, so the
/// first order under the threshold bounds all higher ones.
pub fn bessel_support(x: f64, tol: f64) -> usize {
    let x = x.abs();
    if x == 0.0 {
        return 0;
    }
    let first = x.floor() as usize + 1;
    let mut width = first + 40;
    loop {
        let table = bessel_j_table(width, x);
        if let Some(n) = (first..=width).find(|&n| table[n].abs() < tol) {
            return n;
        }
        width += 40;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (1/2π) ∫₀^{2π} cos(nτ − x sin τ) dτ by the periodic trapezoid rule,
    /// which converges exponentially for this integrand.
    fn integral_oracle(n: i32, x: f64) -> f64 {
        let samples = 8192;
        let h = 2.0 * std::f64::consts::PI / samples as f64;
        let s: f64 = (0..samples)
            .map(|j| {
                let t = j as f64 * h;
                (n as f64 * t - x * t.sin()).cos()
            })
            .sum();
        s / samples as f64
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(-7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn matches_integral_representation() {
        let v = bessel_j(3, 7.87).unwrap();
        assert!((v - integral_oracle(3, 7.87)).abs() < 1e-10);
        for &x in &[0.01, 0.5, 2.18, 7.87, 12.0, 33.3, 50.0] {
            for n in [0, 1, 2, 5, 9, 17, 30, 48, 60, -3, -11] {
                let got = bessel_j(n, x).unwrap();
                let want = integral_oracle(n, x);
                assert!((got - want).abs() < 1e-10, "J_{n}({x}) = {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn known_reference_values() {
        // Abramowitz & Stegun table values
        assert!((bessel_j(0, 1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j(1, 1.0).unwrap() - 0.440_050_585_744_933_5).abs() < 1e-14);
        assert!((bessel_j(2, 10.0).unwrap() - 0.254_630_313_685_120_6).abs() < 1e-13);
    }

    #[test]
    fn reflection_symmetry() {
        for &x in &[0.5, 2.18, 7.87] {
            for k in 0..=40 {
                let pos = bessel_j(k, x).unwrap();
                let neg = bessel_j(-k, x).unwrap();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert!((neg - sign * pos).abs() <= 1e-12);
            }
        }
        let v = bessel_j(3, -2.0).unwrap();
        assert!((v + bessel_j(3, 2.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn sum_of_squares_is_one() {
        for &x in &[0.0f64, 0.3, 2.18, 7.87, 12.0, 25.0, 50.0] {
            let k = x.ceil() as usize + 40;
            let sym = bessel_j_symmetric(k, x);
            let s: f64 = sym.iter().map(|v| v * v).sum();
            assert!((s - 1.0).abs() <= 1e-12, "x = {x}: {s}");
        }
    }

    #[test]
    fn envelope_is_enforced() {
        assert!(bessel_j(201, 1.0).is_err());
        assert!(bessel_j(0, 50.1).is_err());
        assert!(bessel_j(0, f64::NAN).is_err());
        assert!(bessel_j(200, 50.0).is_ok());
    }

    #[test]
    fn support_bounds_tail() {
        let n = bessel_support(7.87, 1e-14);
        let t = bessel_j_table(n + 30, 7.87);
        assert!(t[n..].iter().all(|v| v.abs() < 1e-14));
        assert!(t[n - 1].abs() >= 1e-14);
        assert_eq!(bessel_support(0.0, 1e-14), 0);
    }
}
