//! Modified Bessel functions `I_ν`, `K_ν` of real order `ν > 0` and
//! positive real argument.
//!
//! Regimes, with crossover `t_c(ν) = max(30, ν²)`:
//!
//! * `t <= t_c` (`SeriesRegion`): `I_ν` from its ascending power series,
//!   summed with running rescaling so it never overflows internally.
//!   `K_ν` from Temme's series for `t <= 2` and Steed's continued fraction
//!   (CF2) above, each at the reduced order `μ = ν - round(ν)` followed by
//!   upward recurrence in the order. Temme's series contains the logarithmic
//!   limit at integer order, so `K_n` needs no special case.
//! * `t > t_c` (`AsymptoticRegion`): Hankel's large-argument expansions,
//!   summed until the terms drop below machine epsilon.
//!
//! Unscaled entry points return [`Error::Overflow`] once the value leaves the
//! normal `f64` range (around `t > 700`); the `*_scaled` variants return
//! `e^{-t} I_ν(t)` and `e^{t} K_ν(t)` and stay finite.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{check_positive, Error, Result};
use crate::gamma::{ln_gamma, temme_gammas};
use crate::scaling::Parameters;

const EPS: f64 = f64::EPSILON;
const MAX_ITER: usize = 100_000;
const RESCALE: f64 = 1e250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    SeriesRegion,
    AsymptoticRegion,
}

/// One `(ν, t)` evaluation of both kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselEval {
    #[serde(rename = "nu")]
    pub order: f64,
    #[serde(rename = "t")]
    pub argument: f64,
    #[serde(rename = "I")]
    pub i_value: f64,
    #[serde(rename = "K")]
    pub k_value: f64,
    pub regime: Regime,
    /// When set, `i_value = e^{-t} I_ν(t)` and `k_value = e^{t} K_ν(t)`.
    #[serde(default)]
    pub scaled: bool,
}

/// `I(t) = t^e I_ν(t)` and `K(t) = t^e K_ν(t)` with `e = (N+α)/(2-α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedKernels {
    pub big_i: f64,
    pub big_k: f64,
    pub weight_exponent: f64,
}

pub fn crossover(order: f64) -> f64 {
    (order * order).max(30.0)
}

pub fn regime(order: f64, argument: f64) -> Regime {
    if argument <= crossover(order) {
        Regime::SeriesRegion
    } else {
        Regime::AsymptoticRegion
    }
}

fn check_args(order: f64, argument: f64) -> Result<()> {
    check_positive("Bessel order", order)?;
    check_positive("Bessel argument", argument)
}

/// A positive number stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    mantissa: f64,
    log_scale: f64,
}

impl Scaled {
    fn value(self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }

    fn times_exp(self, shift: f64) -> f64 {
        self.mantissa * (self.log_scale + shift).exp()
    }
}

fn i_series(order: f64, x: f64) -> Scaled {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut extra = 0.0;
    let peak = 0.5 * x;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= q / (kf * (order + kf));
        sum += term;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            extra += RESCALE.ln();
        }
        if kf > peak && term < EPS * sum {
            break;
        }
    }
    Scaled {
        mantissa: sum,
        log_scale: order * (0.5 * x).ln() - ln_gamma(order + 1.0) + extra,
    }
}

/// Hankel expansion coefficients summed as `Σ sign^k a_k(ν) / x^k`.
fn hankel_sum(order: f64, x: f64, alternating: bool) -> f64 {
    let mu = 4.0 * order * order;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (8.0 * kf * x);
        let signed = if alternating && k % 2 == 1 { -term } else { term };
        if term.abs() > last {
            break;
        }
        sum += signed;
        last = term.abs();
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum
}

fn i_scaled_asymptotic(order: f64, x: f64) -> f64 {
    hankel_sum(order, x, true) / (2.0 * PI * x).sqrt()
}

fn k_scaled_asymptotic(order: f64, x: f64) -> f64 {
    (PI / (2.0 * x)).sqrt() * hankel_sum(order, x, false)
}

/// `(K_μ(x), K_{μ+1}(x))` by Temme's series, `|μ| <= 1/2`, `x <= 2`.
fn k_temme(mu: f64, x: f64) -> (f64, f64) {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2) = temme_gammas(mu);
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu * mu);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

/// `(e^x K_μ(x), e^x K_{μ+1}(x))` by Steed's continued fraction, `x > 2`.
fn k_cf2_scaled(mu: f64, x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let kmu = (PI / (2.0 * x)).sqrt() / s;
    (kmu, kmu * (mu + x + 0.5 - h) / x)
}

/// `K_ν(x) * e^{x}` if `scaled`, else `K_ν(x)`, in the series region.
fn k_series_region(order: f64, x: f64, scaled: bool) -> f64 {
    let nl = (order + 0.5).floor();
    let mu = order - nl;
    let (mut kmu, mut k1) = if x <= 2.0 {
        let (a, b) = k_temme(mu, x);
        if scaled {
            (a * x.exp(), b * x.exp())
        } else {
            (a, b)
        }
    } else {
        let (a, b) = k_cf2_scaled(mu, x);
        if scaled {
            (a, b)
        } else {
            (a * (-x).exp(), b * (-x).exp())
        }
    };
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * (2.0 / x) * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    kmu
}

fn finite_normal(value: f64, what: &str, order: f64, argument: f64) -> Result<f64> {
    if value.is_normal() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Overflow(format!(
            "{what}(ν={order}, t={argument}) = {value} is outside the normal f64 range; use the scaled entry point"
        )))
    }
}

/// `I_ν(t)`.
pub fn eval_i(order: f64, argument: f64) -> Result<f64> {
    check_args(order, argument)?;
    let value = match regime(order, argument) {
        Regime::SeriesRegion => i_series(order, argument).value(),
        Regime::AsymptoticRegion => {
            let s = i_scaled_asymptotic(order, argument);
            s * argument.exp()
        }
    };
    finite_normal(value, "I", order, argument)
}

/// `e^{-t} I_ν(t)`.
pub fn eval_i_scaled(order: f64, argument: f64) -> Result<f64> {
    check_args(order, argument)?;
    let value = match regime(order, argument) {
        Regime::SeriesRegion => i_series(order, argument).times_exp(-argument),
        Regime::AsymptoticRegion => i_scaled_asymptotic(order, argument),
    };
    finite_normal(value, "scaled I", order, argument)
}

/// `K_ν(t)`.
pub fn eval_k(order: f64, argument: f64) -> Result<f64> {
    check_args(order, argument)?;
    let value = match regime(order, argument) {
        Regime::SeriesRegion => k_series_region(order, argument, false),
        Regime::AsymptoticRegion => k_scaled_asymptotic(order, argument) * (-argument).exp(),
    };
    finite_normal(value, "K", order, argument)
}

/// `e^{t} K_ν(t)`.
pub fn eval_k_scaled(order: f64, argument: f64) -> Result<f64> {
    check_args(order, argument)?;
    let value = match regime(order, argument) {
        Regime::SeriesRegion => k_series_region(order, argument, true),
        Regime::AsymptoticRegion => k_scaled_asymptotic(order, argument),
    };
    finite_normal(value, "scaled K", order, argument)
}

pub fn evaluate(order: f64, argument: f64) -> Result<BesselEval> {
    Ok(BesselEval {
        order,
        argument,
        i_value: eval_i(order, argument)?,
        k_value: eval_k(order, argument)?,
        regime: regime(order, argument),
        scaled: false,
    })
}

pub fn evaluate_scaled(order: f64, argument: f64) -> Result<BesselEval> {
    Ok(BesselEval {
        order,
        argument,
        i_value: eval_i_scaled(order, argument)?,
        k_value: eval_k_scaled(order, argument)?,
        regime: regime(order, argument),
        scaled: true,
    })
}

pub fn weighted_kernels(params: &Parameters, t: f64) -> Result<WeightedKernels> {
    let nu = params.nu()?;
    let weight_exponent = params.kernel_exponent()?;
    let w = t.powf(weight_exponent);
    Ok(WeightedKernels {
        big_i: w * eval_i(nu, t)?,
        big_k: w * eval_k(nu, t)?,
        weight_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Ascending series of I_{±ν}, summed independently of the library path.
    fn i_series_oracle(order: f64, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..200 {
            let kf = k as f64;
            let rg = 1.0 / gamma(order + kf + 1.0);
            let term = (0.5 * x).powf(order + 2.0 * kf) * rg / gamma(kf + 1.0);
            sum += term;
            if k > 5 && term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn half_order_closed_forms() {
        let i = eval_i(0.5, 1.0).unwrap();
        let k = eval_k(0.5, 1.0).unwrap();
        assert!(rel(i, (2.0 / PI).sqrt() * 1f64.sinh()) < 1e-14);
        assert!(rel(k, (PI / 2.0).sqrt() * (-1f64).exp()) < 1e-14);
        assert!((i - 0.937_674_888_245_488).abs() < 1e-12);
        assert!((k - 0.461_068_504_447_894).abs() < 1e-12);
    }

    #[test]
    fn k_matches_reflection_oracle_at_small_argument() {
        // K_ν = (π/2)(I_{-ν} - I_ν)/sin(πν), fine where cancellation is mild.
        for &(nu, x) in &[(0.5, 1.0), (0.3, 0.7), (1.7, 1.5), (2.25, 0.2)] {
            let oracle = 0.5 * PI * (i_series_oracle(-nu, x) - i_series_oracle(nu, x))
                / (PI * nu).sin();
            assert!(rel(eval_k(nu, x).unwrap(), oracle) < 1e-11, "ν={nu} x={x}");
        }
    }

    #[test]
    fn mpmath_reference_values() {
        // besseli / besselk from mpmath at 30 digits.
        let cases = [
            (1.0, 0.001, 5.000_000_625_000_026e-4, 999.996_238_156_085_6),
            (1.0, 2.0, 1.590_636_854_637_329, 0.139_865_881_816_522_43),
            (2.0, 5.0, 17.505_614_966_624_236, 0.005_308_943_712_223_46),
            (4.0, 50.0, 2.495_098_943_579_121e20, 3.995_284_251_717_343e-23),
            (1.5, 30.0, 7.524_205_332_124_315e11, 2.212_612_151_487_878_4e-14),
            (3.0, 12.0, 1.283_289_304_196_444_2e4, 3.151_630_234_135_862e-6),
        ];
        for (nu, t, i_ref, k_ref) in cases {
            assert!(rel(eval_i(nu, t).unwrap(), i_ref) < 1e-10, "I ν={nu} t={t}");
            assert!(rel(eval_k(nu, t).unwrap(), k_ref) < 1e-10, "K ν={nu} t={t}");
        }
    }

    #[test]
    fn small_argument_leading_order() {
        let i = eval_i(1.0, 1e-3).unwrap();
        assert!(rel(i, 5e-4) < 1e-6);
        let k = eval_k(1.0, 1e-3).unwrap();
        assert!(rel(k, 1000.0) < 1e-5);
        // at ν = 0.3 the next term of K is (t/2)^{0.6}Γ(−0.3)/Γ(0.3) ≈ 1.5% at t = 1e-3
        for &(nu, t) in &[(0.3, 1e-5), (0.5, 1e-3), (1.0, 1e-3), (1.5, 1e-3), (2.5, 1e-3), (3.0, 1e-3)] {
            let ri = eval_i(nu, t).unwrap() * 2f64.powf(nu) * gamma(nu + 1.0) / t.powf(nu);
            let rk = eval_k(nu, t).unwrap() * 2f64.powf(1.0 - nu) / (gamma(nu) * t.powf(-nu));
            assert!((ri - 1.0).abs() < 0.01 && (rk - 1.0).abs() < 0.01, "ν={nu}");
        }
    }

    #[test]
    fn large_argument_leading_order() {
        let t = 30.0;
        let lead = eval_k(1.5, t).unwrap() * t.sqrt() * t.exp();
        // leading order plus the first correction (4ν²−1)/(8t), which is 3.3% here
        assert!(rel(lead, (PI / 2.0).sqrt() * (1.0 + 8.0 / (8.0 * t))) < 1e-3);
        let t = 2000.0;
        let lead = eval_k_scaled(1.5, t).unwrap() * t.sqrt();
        assert!(rel(lead, (PI / 2.0).sqrt()) < 1e-3);
    }

    #[test]
    fn continuity_across_crossover() {
        for &nu in &[0.3, 1.0, 2.5, 4.0, 6.0, 8.5] {
            let tc = crossover(nu);
            let below = tc * (1.0 - 1e-13);
            let above = tc * (1.0 + 1e-13);
            assert_eq!(regime(nu, below), Regime::SeriesRegion);
            assert_eq!(regime(nu, above), Regime::AsymptoticRegion);
            let di = rel(eval_i_scaled(nu, below).unwrap(), eval_i_scaled(nu, above).unwrap());
            let dk = rel(eval_k_scaled(nu, below).unwrap(), eval_k_scaled(nu, above).unwrap());
            assert!(di < 1e-9 && dk < 1e-9, "ν={nu}: {di:e} {dk:e}");
        }
    }

    #[test]
    fn integer_order_is_continuous_in_order() {
        for &t in &[0.5, 1.9, 2.1, 7.0] {
            let k = eval_k(2.0, t).unwrap();
            let lo = eval_k(2.0 - 1e-7, t).unwrap();
            let hi = eval_k(2.0 + 1e-7, t).unwrap();
            assert!(rel(k, 0.5 * (lo + hi)) < 1e-12, "t={t}");
        }
    }

    #[test]
    fn overflow_is_reported_and_scaled_stays_finite() {
        assert!(matches!(eval_i(1.0, 800.0), Err(Error::Overflow(_))));
        assert!(matches!(eval_k(1.0, 800.0), Err(Error::Overflow(_))));
        let s = eval_i_scaled(1.0, 800.0).unwrap();
        assert!(rel(s, 1.0 / (2.0 * PI * 800.0).sqrt()) < 1e-3);
        let s = eval_k_scaled(1.0, 800.0).unwrap();
        assert!(rel(s, (PI / 1600.0).sqrt()) < 1e-3);
    }

    #[test]
    fn domain_errors() {
        assert!(eval_i(0.0, 1.0).is_err());
        assert!(eval_i(-1.0, 1.0).is_err());
        assert!(eval_k(1.0, 0.0).is_err());
        assert!(eval_k(1.0, f64::NAN).is_err());
        assert!(eval_k(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn weighted_kernel_origin_exponents() {
        let params = Parameters::new(3, 1.0, 1.0, 4.0).unwrap();
        let one = weighted_kernels(&params, 1.0).unwrap();
        assert_eq!(one.weight_exponent, 4.0);
        assert!(rel(one.big_i, eval_i(1.0, 1.0).unwrap()) < 1e-15);
        assert!(rel(one.big_k, eval_k(1.0, 1.0).unwrap()) < 1e-15);
        // K(t) ≍ t^3 and I(t) ≍ t^5 at the origin
        let a = weighted_kernels(&params, 1e-3).unwrap();
        let b = weighted_kernels(&params, 1e-4).unwrap();
        let slope_k = (a.big_k / b.big_k).log10();
        let slope_i = (a.big_i / b.big_i).log10();
        assert!((slope_k - 3.0).abs() < 1e-3, "{slope_k}");
        assert!((slope_i - 5.0).abs() < 1e-3, "{slope_i}");
    }
}
