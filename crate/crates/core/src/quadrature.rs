//! Quadrature: adaptive Gauss–Kronrod (7/15) and fixed Gauss–Legendre panels.
//!
//! The integrands here are products of power laws and exponentials, so most
//! entry points integrate in the logarithmic variable `s = e^u`, which turns
//! origin power singularities into smooth exponentials in `u`.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-300, rel: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_SEGMENTS: usize = 4000;

/// Globally adaptive G7–K15 on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite limits [{a}, {b}]")));
    }
    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 15;
    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a:e}, {b:e}]: value {total:e}, error {total_err:e}"
            )));
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        if !total.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a:e}, {b:e}]")));
        }
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        // recompute to stop drift from the running sums
        if evaluations % 3000 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(QuadResult { value: total, error: total_err, evaluations })
}

/// `∫_a^b f(s) ds` for `0 < a`, computed in `u = ln s`. `b < a` gives the
/// negated integral.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Quadrature(format!("log-variable limits must be positive: [{a}, {b}]")));
    }
    integrate(|u| {
        let s = u.exp();
        f(s) * s
    }, a.ln(), b.ln(), tol)
}

const MAX_PIECES: usize = 400;

/// Sums pieces produced by `piece(k)` until they become negligible, adding a
/// geometric estimate of the remainder from the observed decay ratio.
fn sum_pieces<P: FnMut(usize) -> Result<QuadResult>>(mut piece: P, rel: f64, what: &str) -> Result<QuadResult> {
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut prev: Option<f64> = None;
    let mut small_run = 0;
    for k in 0..MAX_PIECES {
        let q = piece(k)?;
        total += q.value;
        error += q.error;
        evaluations += q.evaluations;
        let mag = q.value.abs();
        if mag <= rel * total.abs() || mag == 0.0 {
            small_run += 1;
            if small_run >= 3 {
                if let Some(p) = prev {
                    let ratio = if p > 0.0 { mag / p } else { 0.0 };
                    if ratio < 1.0 {
                        let rest = q.value * ratio / (1.0 - ratio);
                        total += rest;
                        error += rest.abs();
                    }
                }
                return Ok(QuadResult { value: total, error, evaluations });
            }
        } else {
            small_run = 0;
        }
        prev = Some(mag);
    }
    Err(Error::Divergent(format!("{what} did not converge after {MAX_PIECES} pieces")))
}

/// `∫_a^∞ f(s) ds`, `a > 0`, by doubling pieces `[c, 2c]` in the log variable.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<QuadResult> {
    if a <= 0.0 {
        return Err(Error::Quadrature(format!("lower limit must be positive, got {a}")));
    }
    let first = a.max(1.0);
    let head = if first > a { integrate_log(&f, a, first, tol)? } else { QuadResult { value: 0.0, error: 0.0, evaluations: 0 } };
    let rest = sum_pieces(
        |k| {
            let lo = first * 2f64.powi(k as i32);
            if lo > 1e300 {
                return Err(Error::Divergent("tail integral reaches f64 range".into()));
            }
            integrate_log(&f, lo, 2.0 * lo, tol)
        },
        tol.rel,
        "tail integral",
    )?;
    Ok(QuadResult {
        value: head.value + rest.value,
        error: head.error + rest.error,
        evaluations: head.evaluations + rest.evaluations,
    })
}

/// `∫_0^b f(s) ds`, `b > 0`, by decades `[b 10^{-k-1}, b 10^{-k}]` in the log
/// variable. The integrand may be power-singular at the origin as long as it
/// is integrable.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: F, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if b <= 0.0 {
        return Err(Error::Quadrature(format!("upper limit must be positive, got {b}")));
    }
    sum_pieces(
        |k| {
            let hi = b * 10f64.powi(-(k as i32));
            if hi < 1e-290 {
                return Err(Error::Divergent("head integral reaches f64 range".into()));
            }
            integrate_log(&f, hi / 10.0, hi, tol)
        },
        tol.rel,
        "head integral",
    )
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// The panel rule used by profile integrals.
pub fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

pub const PANEL_NODES: usize = 6;
