//! Small dense least-squares fits used for endpoint extrapolation and
//! origin-exponent estimation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    /// Standard error of each coefficient.
    pub std_errors: Vec<f64>,
    pub residual_sum_squares: f64,
    pub r_squared: f64,
    pub n: usize,
}

impl LinearFit {
    /// Half-width of the ~95% confidence band of coefficient `i`.
    pub fn band95(&self, i: usize) -> f64 {
        1.96 * self.std_errors[i]
    }
}

/// Ordinary least squares `y ≈ X c` via modified Gram–Schmidt QR.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<LinearFit> {
    let n = y.len();
    let m = rows.first().map_or(0, Vec::len);
    if n != rows.len() || m == 0 || n < m {
        return Err(Error::Inconclusive(format!(
            "least squares needs at least {m} points, got {n}"
        )));
    }
    // column-major copy
    let mut q: Vec<Vec<f64>> = (0..m).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut r = vec![vec![0.0; m]; m];
    let scale: Vec<f64> = q.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    for j in 0..m {
        for k in 0..j {
            let dot: f64 = q[k].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[k][j] = dot;
            let qk = q[k].clone();
            for (x, qkx) in q[j].iter_mut().zip(&qk) {
                *x -= dot * qkx;
            }
        }
        let norm = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 1e-12 * scale[j]) || !norm.is_finite() {
            return Err(Error::Inconclusive("rank-deficient fit".into()));
        }
        r[j][j] = norm;
        for x in q[j].iter_mut() {
            *x /= norm;
        }
    }
    let qty: Vec<f64> = q.iter().map(|col| col.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut c = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|k| r[i][k] * c[k]).sum();
        c[i] = (qty[i] - s) / r[i][i];
    }
    let rss: f64 = rows
        .iter()
        .zip(y)
        .map(|(row, yi)| {
            let pred: f64 = row.iter().zip(&c).map(|(a, b)| a * b).sum();
            (yi - pred).powi(2)
        })
        .sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|yi| (yi - mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    // diag((R^T R)^{-1}) through R^{-1}
    let mut rinv = vec![vec![0.0; m]; m];
    for i in (0..m).rev() {
        rinv[i][i] = 1.0 / r[i][i];
        for j in i + 1..m {
            let s: f64 = (i + 1..=j).map(|k| r[i][k] * rinv[k][j]).sum();
            rinv[i][j] = -s / r[i][i];
        }
    }
    let dof = (n - m).max(1) as f64;
    let sigma2 = rss / dof;
    let std_errors = (0..m)
        .map(|i| (sigma2 * (i..m).map(|j| rinv[i][j].powi(2)).sum::<f64>()).sqrt())
        .collect();
    Ok(LinearFit { coefficients: c, std_errors, residual_sum_squares: rss, r_squared, n })
}

/// Fits `y = a + b x` and returns the fit (`coefficients = [a, b]`).
pub fn line(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&xi| vec![1.0, xi]).collect();
    least_squares(&rows, y)
}
