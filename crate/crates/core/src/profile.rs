//! Sampled radial profiles on explicit grids.
//!
//! A profile stores values and first derivatives on a strictly increasing
//! positive grid. Interpolation and differentiation work in the logarithmic
//! coordinate `u = ln x`, where origin power laws become exponentials.

use std::fmt;
use std::io::{Read, Write};
use std::marker::PhantomData;
use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::quadrature::panel_rule;

pub const DEFAULT_T_MIN: f64 = 1e-4;
pub const DEFAULT_T_MAX: f64 = 50.0;
pub const DEFAULT_POINTS: usize = 2048;

/// Names the independent variable of a profile and its CSV columns.
pub trait Variable: Clone + fmt::Debug + PartialEq {
    const COLUMNS: [&'static str; 3];
}

/// The Bessel variable `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TVar;

/// The physical radius `r = |x|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RVar;

impl Variable for TVar {
    const COLUMNS: [&'static str; 3] = ["t", "v", "dv"];
}

impl Variable for RVar {
    const COLUMNS: [&'static str; 3] = ["r", "phi", "dphi"];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile<V: Variable> {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivative_values: Vec<f64>,
    _var: PhantomData<V>,
}

/// `v(t)` on a `t`-grid.
pub type VProfile = Profile<TVar>;
/// `φ(r)` on an `r`-grid.
pub type PhiProfile = Profile<RVar>;

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "bad log grid [{lo}, {hi}] x {n}");
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

pub fn default_grid() -> Vec<f64> {
    log_grid(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_POINTS)
}

/// Fornberg weights for the first derivative at `x0` from nodes `xs`.
fn fornberg_d1(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Fourth-order derivative `dy/dx` of samples on a positive grid, computed in
/// `u = ln x` with five-point stencils (one-sided at the ends).
pub fn log_derivative(grid: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let n = grid.len();
    if n < 5 || values.len() != n {
        return domain(format!("finite differences need >= 5 samples, got {n}"));
    }
    let u: Vec<f64> = grid.iter().map(|x| x.ln()).collect();
    Ok((0..n)
        .map(|i| {
            let s = i.saturating_sub(2).min(n - 5);
            let w = fornberg_d1(u[i], &u[s..s + 5]);
            let dydu: f64 = w.iter().zip(&values[s..s + 5]).map(|(w, y)| w * y).sum();
            dydu / grid[i]
        })
        .collect())
}

impl<V: Variable> Profile<V> {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, derivative_values: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return domain("empty grid");
        }
        if values.len() != grid.len() || derivative_values.len() != grid.len() {
            return domain(format!(
                "length mismatch: grid {}, values {}, derivatives {}",
                grid.len(),
                values.len(),
                derivative_values.len()
            ));
        }
        if !(grid[0] > 0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) || !grid[grid.len() - 1].is_finite() {
            return domain("grid must be positive, finite and strictly increasing");
        }
        if values.iter().chain(&derivative_values).any(|x| !x.is_finite()) {
            return domain("profile contains non-finite samples");
        }
        Ok(Self { grid, values, derivative_values, _var: PhantomData })
    }

    /// Samples `f` and its derivative `df` on `grid`.
    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        let derivs = grid.iter().map(|&x| df(x)).collect();
        Self::new(grid, values, derivs)
    }

    /// Derivatives from fourth-order finite differences of `values`.
    pub fn from_values(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let derivs = log_derivative(&grid, &values)?;
        Self::new(grid, values, derivs)
    }

    pub fn zero(grid: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![0.0; n], vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.grid[0]
    }

    pub fn last(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index `i` of the panel `[grid[i], grid[i+1]]` containing `x`.
    fn panel(&self, x: f64) -> Result<usize> {
        let (lo, hi) = (self.first(), self.last());
        let slack = 1e-12 * hi;
        if !(x >= lo * (1.0 - 1e-12) && x <= hi + slack) || self.len() < 2 {
            return domain(format!("{} = {x:e} outside grid [{lo:e}, {hi:e}]", V::COLUMNS[0]));
        }
        let i = self.grid.partition_point(|&g| g <= x);
        Ok(i.saturating_sub(1).min(self.len() - 2))
    }

    /// Cubic Hermite interpolation in `u = ln x` on panel `i`.
    fn hermite(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = (x1 / x0).ln();
        let s = (x / x0).ln() / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (x0 * self.derivative_values[i], x1 * self.derivative_values[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1
    }

    /// Four-point Lagrange interpolation of the derivative samples in `u`.
    fn lagrange_derivative(&self, i: usize, x: f64) -> f64 {
        let n = self.len();
        if n < 4 {
            let (x0, x1) = (self.grid[i], self.grid[i + 1]);
            let s = (x / x0).ln() / (x1 / x0).ln();
            return (1.0 - s) * self.derivative_values[i] + s * self.derivative_values[i + 1];
        }
        let s = i.saturating_sub(1).min(n - 4);
        let u = x.ln();
        let us: Vec<f64> = self.grid[s..s + 4].iter().map(|g| g.ln()).collect();
        (0..4)
            .map(|j| {
                let l: f64 = (0..4).filter(|&k| k != j).map(|k| (u - us[k]) / (us[j] - us[k])).product();
                l * self.derivative_values[s + j]
            })
            .sum()
    }

    /// Hermite value at `x` known to lie in panel `i`.
    pub(crate) fn value_in_panel(&self, i: usize, x: f64) -> f64 {
        self.hermite(i, x)
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        let i = self.panel(x)?;
        Ok(self.hermite(i, x))
    }

    pub fn derivative_at(&self, x: f64) -> Result<f64> {
        let i = self.panel(x)?;
        Ok(self.lagrange_derivative(i, x))
    }

    /// `∫_a^b f(x, y(x), y'(x)) dx` by Gauss–Legendre on every grid panel
    /// (in the log variable), with the profile interpolated at the nodes.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64, f64, f64) -> f64) -> Result<f64> {
        if !(a < b) {
            return domain(format!("integration limits must satisfy a < b, got [{a:e}, {b:e}]"));
        }
        let ia = self.panel(a)?;
        let ib = self.panel(b)?;
        let (nodes, weights) = panel_rule();
        let mut total = 0.0;
        for i in ia..=ib {
            let lo = self.grid[i].max(a);
            let hi = self.grid[i + 1].min(b);
            if hi <= lo {
                continue;
            }
            let (ul, uh) = (lo.ln(), hi.ln());
            let half = 0.5 * (uh - ul);
            let mid = 0.5 * (uh + ul);
            for (z, w) in nodes.iter().zip(weights) {
                let x = (mid + half * z).exp();
                total += w * half * x * f(x, self.hermite(i, x), self.lagrange_derivative(i, x));
            }
        }
        Ok(total)
    }

    /// `sup |self − other|` over the grid points of `self` within `[lo, hi]`.
    pub fn sup_distance(&self, other: &Self, lo: f64, hi: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, y) in self.grid.iter().zip(&self.values) {
            if *x >= lo && *x <= hi {
                worst = worst.max((y - other.value_at(*x)?).abs());
            }
        }
        Ok(worst)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(V::COLUMNS)?;
        for i in 0..self.len() {
            w.write_record(&[
                format!("{:e}", self.grid[i]),
                format!("{:e}", self.values[i]),
                format!("{:e}", self.derivative_values[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `x,y,dy` (or `x,y`, differentiating numerically) with the
    /// column names of this profile kind.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let want = V::COLUMNS;
        if header.len() < 2 || header[0] != want[0] || header[1] != want[1] {
            return Err(Error::Parse(format!(
                "expected header {},{},{} but found {}",
                want[0],
                want[1],
                want[2],
                header.join(",")
            )));
        }
        let with_derivative = header.len() >= 3 && header[2] == want[2];
        let (mut g, mut v, mut d) = (Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let num = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("row {}: bad column {k}", line + 2)))
            };
            g.push(num(0)?);
            v.push(num(1)?);
            if with_derivative {
                d.push(num(2)?);
            }
        }
        if with_derivative {
            Self::new(g, v, d)
        } else {
            Self::from_values(g, v)
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}
