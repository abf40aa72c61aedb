//! Behavior of solutions near the origin: predicted cases and constants, the
//! envelope `w`, measured exponents, the pointwise `t^{−ν}` bound and the
//! vanishing of `r^{β−2}φ²`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exact::{self, Rational};
use crate::fit;
use crate::gamma::gamma;
use crate::green::kernel_integral;
use crate::profile::{log_grid, PhiProfile, VProfile};
use crate::quadrature::Tolerance;
use crate::scaling::{extended_integral, ExactExponents, Parameters};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OriginCase {
    Bounded,
    Logarithmic,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeConstants {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginBehavior {
    pub case: OriginCase,
    /// `ν(2*−1−p)` in the power case, else 0.
    pub t_exponent: f64,
    /// `−(N−2)(p−2*+1)/2` in the power case, else 0.
    pub r_exponent: f64,
    pub constants: Option<EnvelopeConstants>,
}

/// Case and exponents in exact arithmetic; `None` outside `0 < α < 2`.
pub fn exact_origin_exponents(e: &ExactExponents) -> Option<(OriginCase, Rational, Rational)> {
    let nu = e.nu()?;
    let shifted = e.two_star() - exact::int(1) - &e.power;
    let case = if shifted > exact::int(0) {
        OriginCase::Bounded
    } else if shifted == exact::int(0) {
        OriginCase::Logarithmic
    } else {
        OriginCase::Power
    };
    if case != OriginCase::Power {
        return Some((case, exact::int(0), exact::int(0)));
    }
    let n2 = exact::int(e.dim as i64 - 2);
    Some((case, &nu * &shifted, n2 * shifted / exact::int(2)))
}

fn check_existence_band(params: &Parameters) -> Result<()> {
    let e = params.exact();
    let two = exact::int(2);
    if !(e.alpha > exact::int(0) && e.alpha < two) {
        return domain(format!("origin behavior needs 0 < alpha < 2, got {}", params.alpha));
    }
    let lo = e.two_alpha().expect("alpha < N");
    if !(e.power > lo && e.power < e.two_star()) {
        return domain(format!("origin behavior needs 2_alpha < p < 2*, got p = {}", params.power));
    }
    Ok(())
}

pub fn predicted_origin_behavior(params: &Parameters) -> Result<OriginBehavior> {
    check_existence_band(params)?;
    let (case, t_exp, r_exp) = exact_origin_exponents(&params.exact()).expect("alpha < 2 checked");
    let nu = params.nu()?;
    let s = params.two_star();
    let p = params.power;
    let constants = match case {
        OriginCase::Bounded => None,
        OriginCase::Logarithmic => Some(EnvelopeConstants { c1: None, c2: None, c3: Some(1.0 / (2.0 * nu)) }),
        OriginCase::Power => Some(EnvelopeConstants {
            c1: Some(1.0 / (2.0 * nu * nu * (s + 1.0 - p))),
            c2: Some(-1.0 / (2.0 * nu * nu * (s - 1.0 - p))),
            c3: None,
        }),
    };
    Ok(OriginBehavior { case, t_exponent: exact::to_f64(&t_exp), r_exponent: exact::to_f64(&r_exp), constants })
}

const ENVELOPE_TOL: Tolerance = Tolerance { abs: 1e-300, rel: 1e-11 };

/// `w(t) = t^{−ν}{I_ν(t)∫_t^∞ K(s)s^{−ν(p−1)}ds + K_ν(t)∫_0^t I(s)s^{−ν(p−1)}ds}`.
pub fn envelope_w(params: &Parameters, t: f64) -> Result<f64> {
    check_existence_band(params)?;
    let q = -params.nu()? * (params.power - 1.0);
    kernel_integral(params, t, |s| s.powf(q), ENVELOPE_TOL)
}

/// `lim_{t→0} w(t)` in the bounded case, from the Mellin transform of `K_ν`:
/// `w(0) = 2^{μ−2}Γ((μ−ν)/2)Γ((μ+ν)/2) / (2^ν Γ(ν+1))`, `μ = e − ν(p−1) + 1`.
pub fn bounded_envelope_limit(params: &Parameters) -> Result<f64> {
    let behavior = predicted_origin_behavior(params)?;
    if behavior.case != OriginCase::Bounded {
        return domain("w(0) is finite only in the bounded case");
    }
    let nu = params.nu()?;
    let mu = params.kernel_exponent()? - nu * (params.power - 1.0) + 1.0;
    Ok(2f64.powf(mu - 2.0) * gamma((mu - nu) / 2.0) * gamma((mu + nu) / 2.0) / (2f64.powf(nu) * gamma(nu + 1.0)))
}

/// Small-`t` limit of the normalized envelope, measured on `[t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeLimit {
    pub case: OriginCase,
    /// `C₁+C₂`, `C₃` or `w(0)`.
    pub predicted: f64,
    /// Extrapolated limit.
    pub measured: f64,
    pub band95: f64,
    /// Normalized envelope at `t_hi` without extrapolation.
    pub raw_at_t_hi: f64,
    pub relative_error: f64,
    pub window: (f64, f64),
}

/// Fits the normalized envelope with its leading correction:
/// `t^{−e}w = L + a t^{−e}` (power), `w = L(−ln t) + a` (log),
/// `w = L + a t` (bounded).
pub fn envelope_limit(params: &Parameters, t_lo: f64, t_hi: f64, samples: usize) -> Result<EnvelopeLimit> {
    if !(t_lo > 0.0 && t_hi > t_lo) || samples < 4 {
        return domain("envelope window needs 0 < t_lo < t_hi and at least 4 samples");
    }
    let behavior = predicted_origin_behavior(params)?;
    let ts = log_grid(t_lo, t_hi, samples);
    let ws: Vec<f64> = ts.iter().map(|&t| envelope_w(params, t)).collect::<Result<_>>()?;
    let e = behavior.t_exponent;
    let (rows, y, predicted): (Vec<Vec<f64>>, Vec<f64>, f64) = match behavior.case {
        OriginCase::Power => {
            let c = behavior.constants.unwrap();
            (
                ts.iter().map(|t| vec![1.0, t.powf(-e)]).collect(),
                ts.iter().zip(&ws).map(|(t, w)| t.powf(-e) * w).collect(),
                c.c1.unwrap() + c.c2.unwrap(),
            )
        }
        OriginCase::Logarithmic => (
            ts.iter().map(|t| vec![-t.ln(), 1.0]).collect(),
            ws.clone(),
            behavior.constants.unwrap().c3.unwrap(),
        ),
        OriginCase::Bounded => (ts.iter().map(|&t| vec![1.0, t]).collect(), ws.clone(), bounded_envelope_limit(params)?),
    };
    let f = fit::least_squares(&rows, &y)?;
    let raw_at_t_hi = match behavior.case {
        OriginCase::Power => t_hi.powf(-e) * ws[samples - 1],
        OriginCase::Logarithmic => ws[samples - 1] / -t_hi.ln(),
        OriginCase::Bounded => ws[0],
    };
    let measured = f.coefficients[0];
    Ok(EnvelopeLimit {
        case: behavior.case,
        predicted,
        measured,
        band95: f.band95(0),
        raw_at_t_hi,
        relative_error: (measured - predicted).abs() / predicted.abs(),
        window: (t_lo, t_hi),
    })
}

/// Observed behavior over the smallest decade of a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasuredOrigin {
    pub case: OriginCase,
    /// Fitted `d ln v / d ln t`.
    pub exponent: f64,
    pub band95: f64,
    pub r_squared: f64,
    /// Coefficient of `−ln t` in the logarithmic model.
    pub log_coefficient: f64,
    pub window: (f64, f64),
}

/// `|slope|` below which the smallest decade counts as bounded.
pub const BOUNDED_SLOPE: f64 = 0.02;
pub const MIN_R_SQUARED: f64 = 0.99;

/// Model selection between constant, power and logarithm on the first decade.
pub fn fit_origin_behavior(v: &VProfile) -> Result<MeasuredOrigin> {
    let t0 = v.first();
    if t0 >= 1e-3 {
        return domain(format!("profile must reach below t = 1e-3, starts at {t0:e}"));
    }
    let window = (t0, 10.0 * t0);
    let (ts, ys): (Vec<f64>, Vec<f64>) = v.grid.iter().zip(&v.values).filter(|(t, _)| **t <= window.1).map(|(t, y)| (*t, *y)).unzip();
    if ts.len() < 6 {
        return Err(Error::Inconclusive(format!("only {} points in the first decade", ts.len())));
    }
    if ys.iter().any(|y| *y <= 0.0) {
        return Err(Error::Inconclusive("profile is not positive near the origin".into()));
    }
    let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let power = fit::line(&lt, &ly)?;
    let neg_lt: Vec<f64> = lt.iter().map(|x| -x).collect();
    let log = fit::line(&neg_lt, &ys)?;
    let exponent = power.coefficients[1];
    let mut out = MeasuredOrigin {
        case: OriginCase::Bounded,
        exponent,
        band95: power.band95(1),
        r_squared: power.r_squared,
        log_coefficient: log.coefficients[1],
        window,
    };
    if exponent.abs() <= BOUNDED_SLOPE {
        return Ok(out);
    }
    if power.r_squared.max(log.r_squared) < MIN_R_SQUARED {
        return Err(Error::Inconclusive(format!(
            "no model fits the first decade (R² power {:.4}, log {:.4})",
            power.r_squared, log.r_squared
        )));
    }
    let rss = |pred: &dyn Fn(usize) -> f64| (0..ts.len()).map(|i| (ys[i] - pred(i)).powi(2)).sum::<f64>();
    let rss_power = rss(&|i| (power.coefficients[0] + exponent * lt[i]).exp());
    let rss_log = rss(&|i| log.coefficients[0] + log.coefficients[1] * neg_lt[i]);
    if rss_log < rss_power {
        out.case = OriginCase::Logarithmic;
        out.r_squared = log.r_squared;
    } else {
        out.case = OriginCase::Power;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialBound {
    /// `sup t^ν |v(t)| / ‖v'‖`.
    pub ratio: f64,
    pub argmax: f64,
    /// `‖v'‖² = ∫ v'² t^{2ν+1} dt`.
    pub grad_norm_sq: f64,
}

pub fn radial_bound_check(params: &Parameters, v: &VProfile) -> Result<RadialBound> {
    let nu = params.nu()?;
    if v.is_zero() {
        return Ok(RadialBound { ratio: 0.0, argmax: v.first(), grad_norm_sq: 0.0 });
    }
    let w = params.weight_exponent()?;
    let grad = extended_integral(v, |t, _, d| d * d * t.powf(w))?;
    let g2 = grad.total();
    if !g2.is_finite() {
        return Err(Error::Divergent("the gradient norm is infinite".into()));
    }
    if g2 <= 0.0 {
        return domain("zero gradient norm for a nonzero profile");
    }
    let (argmax, sup) = v
        .grid
        .iter()
        .zip(&v.values)
        .map(|(t, y)| (*t, t.powf(nu) * y.abs()))
        .fold((v.first(), 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(RadialBound { ratio: sup / g2.sqrt(), argmax, grad_norm_sq: g2 })
}

/// `v ≤ B M^{p−1} w` with `M = sup t^ν v`, checked at every `stride`-th point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeDomination {
    /// `max v / (B M^{p−1} w)`.
    pub max_ratio: f64,
    pub at: f64,
    pub sup_weighted: f64,
}

pub fn envelope_domination(params: &Parameters, v: &VProfile, stride: usize) -> Result<EnvelopeDomination> {
    let nu = params.nu()?;
    let b = params.b_const()?;
    let m = v.grid.iter().zip(&v.values).map(|(t, y)| t.powf(nu) * y.abs()).fold(0.0, f64::max);
    let scale = b * m.powf(params.power - 1.0);
    let mut best = (0.0, v.first());
    for i in (0..v.len()).step_by(stride.max(1)) {
        let t = v.grid[i];
        let r = v.values[i] / (scale * envelope_w(params, t)?);
        if r > best.0 {
            best = (r, t);
        }
    }
    Ok(EnvelopeDomination { max_ratio: best.0, at: best.1, sup_weighted: m })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FittedLimit {
    Zero,
    Infinite,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfReport {
    pub r_min: f64,
    /// `r^{β−2}φ(r)²` at the smallest grid point.
    pub value_at_r_min: f64,
    /// Fitted power of `r^{β−2}φ²` over the smallest decade.
    pub exponent: f64,
    pub limit: FittedLimit,
}

/// Exponents within this distance of 0 leave the limit undecided.
pub const LIMIT_DEADBAND: f64 = 0.02;

pub fn liminf_check(params: &Parameters, phi: &PhiProfile) -> Result<LiminfReport> {
    let r0 = phi.first();
    if r0 >= 1e-3 {
        return domain(format!("profile must reach below r = 1e-3, starts at {r0:e}"));
    }
    let beta = params.beta();
    let g: Vec<(f64, f64)> = phi
        .grid
        .iter()
        .zip(&phi.values)
        .filter(|(r, _)| **r <= 10.0 * r0)
        .map(|(r, y)| (*r, r.powf(beta - 2.0) * y * y))
        .collect();
    let value_at_r_min = g[0].1;
    if g.iter().all(|x| x.1 == 0.0) {
        return Ok(LiminfReport { r_min: r0, value_at_r_min, exponent: f64::INFINITY, limit: FittedLimit::Zero });
    }
    if g.len() < 6 || g.iter().any(|x| x.1 <= 0.0) {
        return Err(Error::Inconclusive("cannot fit r^(beta-2) phi^2 on the first decade".into()));
    }
    let (lr, lg): (Vec<f64>, Vec<f64>) = g.iter().map(|(r, y)| (r.ln(), y.ln())).unzip();
    let exponent = fit::line(&lr, &lg)?.coefficients[1];
    let limit = if exponent.abs() <= LIMIT_DEADBAND {
        FittedLimit::Inconclusive
    } else if exponent > 0.0 {
        FittedLimit::Zero
    } else {
        FittedLimit::Infinite
    };
    Ok(LiminfReport { r_min: r0, value_at_r_min, exponent, limit })
}

/// Predicted against measured origin behavior for one profile.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub predicted: OriginBehavior,
    pub measured: Option<MeasuredOrigin>,
    pub measurement_error: Option<String>,
    pub radial_bound: Option<RadialBound>,
    pub pass: bool,
}

/// Exponent tolerance used by [`verify`].
pub const EXPONENT_TOLERANCE: f64 = 0.05;

pub fn verify(params: &Parameters, v: &VProfile) -> Result<AsymptoticsReport> {
    let predicted = predicted_origin_behavior(params)?;
    let (measured, measurement_error) = match fit_origin_behavior(v) {
        Ok(m) => (Some(m), None),
        Err(Error::Inconclusive(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let radial_bound = radial_bound_check(params, v).ok();
    let pass = measured.as_ref().is_some_and(|m| {
        m.case == predicted.case
            && match m.case {
                OriginCase::Logarithmic => true,
                _ => (m.exponent - predicted.t_exponent).abs() <= EXPONENT_TOLERANCE,
            }
    });
    Ok(AsymptoticsReport { predicted, measured, measurement_error, radial_bound, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::default_grid;
    use approx::assert_relative_eq;

    fn params(n: u32, p: f64) -> Parameters {
        Parameters::new(n, 1.0, 1.0, p).unwrap()
    }

    #[test]
    fn predicted_cases() {
        assert_eq!(predicted_origin_behavior(&params(3, 4.0)).unwrap().case, OriginCase::Bounded);
        assert_eq!(predicted_origin_behavior(&params(3, 5.0)).unwrap().case, OriginCase::Logarithmic);
        let b = predicted_origin_behavior(&params(3, 5.5)).unwrap();
        assert_eq!(b.case, OriginCase::Power);
        assert_relative_eq!(b.t_exponent, -0.5, epsilon = 1e-15);
        assert_relative_eq!(b.r_exponent, -0.25, epsilon = 1e-15);
        let c = b.constants.unwrap();
        assert_relative_eq!(c.c1.unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        for p in [2.9, 3.0, 6.0, 7.0] {
            assert!(predicted_origin_behavior(&params(3, p)).is_err(), "p = {p}");
        }
    }

    #[test]
    fn high_dimension_is_always_power() {
        let q = Parameters::new(7, 1.0, 1.0, 2.5).unwrap();
        let (lo, hi) = (q.two_alpha().unwrap(), q.two_star());
        for k in 1..20 {
            let p = lo + (hi - lo) * k as f64 / 20.0;
            let b = predicted_origin_behavior(&Parameters::new(7, 1.0, 1.0, p).unwrap()).unwrap();
            assert_eq!(b.case, OriginCase::Power, "p = {p}");
        }
    }

    #[test]
    fn bounded_envelope_has_finite_limit() {
        let q = params(3, 4.0);
        let w0 = bounded_envelope_limit(&q).unwrap();
        assert_relative_eq!(w0, std::f64::consts::FRAC_PI_4, max_relative = 1e-13);
        let w = envelope_w(&q, 1e-5).unwrap();
        assert_relative_eq!(w, w0, max_relative = 1e-3);
    }

    #[test]
    fn log_envelope_constant() {
        let lim = envelope_limit(&params(3, 5.0), 1e-6, 1e-4, 9).unwrap();
        assert!(lim.relative_error < 0.02, "{lim:?}");
    }

    #[test]
    fn constant_plus_linear_is_bounded() {
        let v = VProfile::from_fn(default_grid(), |t| 3.0 + t, |_| 1.0).unwrap();
        let m = fit_origin_behavior(&v).unwrap();
        assert_eq!(m.case, OriginCase::Bounded);
        assert!(m.exponent.abs() < 1e-3);
    }

    #[test]
    fn exact_power_law() {
        let v = VProfile::from_fn(default_grid(), |t| t.powf(-0.5), |t| -0.5 * t.powf(-1.5)).unwrap();
        let m = fit_origin_behavior(&v).unwrap();
        assert_eq!(m.case, OriginCase::Power);
        assert!((m.exponent + 0.5).abs() < 0.01);
    }

    #[test]
    fn logarithm_is_detected() {
        let v = VProfile::from_fn(default_grid(), |t| 1.0 - t.ln(), |t| -1.0 / t).unwrap();
        let m = fit_origin_behavior(&v).unwrap();
        assert_eq!(m.case, OriginCase::Logarithmic);
        assert_relative_eq!(m.log_coefficient, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn coarse_start_is_rejected() {
        let v = VProfile::from_fn(log_grid(1e-2, 10.0, 100), |t| t, |_| 1.0).unwrap();
        assert!(matches!(fit_origin_behavior(&v), Err(Error::Domain(_))));
    }

    #[test]
    fn radial_bound_examples() {
        let q = params(3, 4.0);
        let zero = VProfile::zero(default_grid()).unwrap();
        assert_eq!(radial_bound_check(&q, &zero).unwrap().ratio, 0.0);
        let e = VProfile::from_fn(default_grid(), |t| (-t).exp(), |t| -(-t).exp()).unwrap();
        let rb = radial_bound_check(&q, &e).unwrap();
        // sup t e^{−t} = 1/e at t = 1, ∫ e^{−2t} t³ = 3/8
        assert_relative_eq!(rb.grad_norm_sq, 0.375, max_relative = 1e-8);
        assert_relative_eq!(rb.ratio, (-1f64).exp() / 0.375f64.sqrt(), max_relative = 1e-5);
        assert!((rb.argmax - 1.0).abs() < 0.01);
    }

    #[test]
    fn liminf_examples() {
        let q = params(3, 3.2);
        let grid = log_grid(1e-6, 10.0, 700);
        let one = PhiProfile::from_fn(grid.clone(), |_| 1.0, |_| 0.0).unwrap();
        let r = liminf_check(&q, &one).unwrap();
        assert_eq!(r.limit, FittedLimit::Zero);
        assert_relative_eq!(r.exponent, 2.0 / 3.0, max_relative = 1e-9);
        let env = PhiProfile::from_fn(grid, |r| r.powf(-0.5), |r| -0.5 * r.powf(-1.5)).unwrap();
        let r = liminf_check(&q, &env).unwrap();
        assert_eq!(r.limit, FittedLimit::Infinite);
        assert_relative_eq!(r.exponent, -1.0 / 3.0, max_relative = 1e-9);
    }
}
