//! Dense least squares through column-pivoted Householder QR.
//!
//! Ridge regression is solved as the stacked problem `[H; λI] W ≈ [Y; 0]`,
//! whose normal equations are `(HᵀH + λ²I) W = HᵀY`. The Gram matrix is never
//! formed.

use super::{NumericsError, RealMatrix};

/// Column-pivoted QR of a tall matrix, stored column-major.
struct PivotedQr {
    rows: usize,
    cols: usize,
    /// Householder vectors below the diagonal, R on and above it.
    a: Vec<Vec<f64>>,
    tau: Vec<f64>,
    perm: Vec<usize>,
}

impl PivotedQr {
    fn factor(mut a: Vec<Vec<f64>>, rows: usize) -> Self {
        let cols = a.len();
        let steps = rows.min(cols);
        let mut perm: Vec<usize> = (0..cols).collect();
        let mut tau = vec![0.0; steps];
        let mut norms: Vec<f64> = a.iter().map(|c| sq_norm(c)).collect();

        for k in 0..steps {
            // pivot on the largest remaining column norm, recomputed exactly
            // to avoid drift from downdating
            for j in k..cols {
                norms[j] = sq_norm(&a[j][k..]);
            }
            let p = (k..cols)
                .max_by(|&i, &j| norms[i].total_cmp(&norms[j]).then(j.cmp(&i)))
                .unwrap_or(k);
            if p != k {
                a.swap(k, p);
                norms.swap(k, p);
                perm.swap(k, p);
            }

            let alpha = norms[k].sqrt();
            if alpha == 0.0 {
                tau[k] = 0.0;
                continue;
            }
            let x0 = a[k][k];
            let beta = if x0 >= 0.0 { -alpha } else { alpha };
            let v0 = x0 - beta;
            for v in a[k][k + 1..].iter_mut() {
                *v /= v0;
            }
            tau[k] = (beta - x0) / beta;
            a[k][k] = beta;

            let (head, tail) = a.split_at_mut(k + 1);
            let hv = &head[k];
            for col in tail.iter_mut() {
                let mut s = col[k];
                for i in k + 1..rows {
                    s += hv[i] * col[i];
                }
                s *= tau[k];
                col[k] -= s;
                for i in k + 1..rows {
                    col[i] -= s * hv[i];
                }
            }
        }
        Self {
            rows,
            cols,
            a,
            tau,
            perm,
        }
    }

    fn r_diag(&self, k: usize) -> f64 {
        self.a[k][k]
    }

    /// Applies Qᵀ to `b` in place.
    fn apply_qt(&self, b: &mut [f64]) {
        for k in 0..self.tau.len() {
            if self.tau[k] == 0.0 {
                continue;
            }
            let v = &self.a[k];
            let mut s = b[k];
            for i in k + 1..self.rows {
                s += v[i] * b[i];
            }
            s *= self.tau[k];
            b[k] -= s;
            for i in k + 1..self.rows {
                b[i] -= s * v[i];
            }
        }
    }

    /// Solves `R z = (Qᵀb)[..n]` and undoes the column permutation.
    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        self.apply_qt(&mut b);
        let n = self.cols;
        let mut z = vec![0.0; n];
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..n {
                s -= self.a[j][k] * z[j];
            }
            z[k] = s / self.a[k][k];
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Ridge regression `W = (HᵀH + λ²I)⁻¹ HᵀY`.
///
/// With `lambda == 0` this is ordinary least squares and a numerically
/// rank-deficient `H` is reported instead of solved.
pub fn ridge_solve(h: &RealMatrix, y: &RealMatrix, lambda: f64) -> Result<RealMatrix, NumericsError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(NumericsError::InvalidRegularization(lambda));
    }
    if h.nrows() != y.nrows() {
        return Err(NumericsError::Shape(format!(
            "H has {} rows but Y has {}",
            h.nrows(),
            y.nrows()
        )));
    }
    let n = h.ncols();
    let m = h.nrows();
    let rows = if lambda > 0.0 { m + n } else { m };
    if n == 0 {
        return Ok(RealMatrix::zeros(0, y.ncols()));
    }
    if rows < n {
        return Err(NumericsError::RankDeficient {
            column: m,
            rank: m,
            cols: n,
        });
    }

    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut c = Vec::with_capacity(rows);
            c.extend((0..m).map(|i| h.get(i, j)));
            if lambda > 0.0 {
                c.extend((0..n).map(|i| if i == j { lambda } else { 0.0 }));
            }
            c
        })
        .collect();

    let qr = PivotedQr::factor(cols, rows);
    let lead = qr.r_diag(0).abs();
    let tol = if lambda > 0.0 {
        0.0
    } else {
        f64::EPSILON * rows.max(n) as f64 * lead
    };
    for k in 0..n {
        let d = qr.r_diag(k).abs();
        if d <= tol || d == 0.0 {
            return Err(NumericsError::RankDeficient {
                column: qr.perm[k],
                rank: k,
                cols: n,
            });
        }
    }

    let mut w = RealMatrix::zeros(n, y.ncols());
    for c in 0..y.ncols() {
        let mut b = y.col(c);
        b.resize(rows, 0.0);
        let x = qr.solve(b);
        for (r, v) in x.into_iter().enumerate() {
            w.set(r, c, v);
        }
    }
    Ok(w)
}

/// Ordinary least squares `W = pinv(H) Y` for full-column-rank `H`.
pub fn ols_solve(h: &RealMatrix, y: &RealMatrix) -> Result<RealMatrix, NumericsError> {
    ridge_solve(h, y, 0.0)
}
