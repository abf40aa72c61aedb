//! Problem data, derived constants and the change of variables between the
//! radial form `φ(r)` and the Bessel form `v(t)`.
//!
//! For `0 < α < 2` the substitution
//!
//! ```text
//! t = (2√A/(2−α)) r^{(2−α)/2},   r = c t^m,   c = ((2−α)/(2√A))^{2/(2−α)},  m = 2/(2−α)
//! ```
//!
//! turns `−φ'' − (N−1)/r φ' + A r^{−α} φ = φ^{p−1}` into
//! `−v'' − (2ν+1)/t v' + v = B t^{2α/(2−α)} v^{p−1}` with `ν = (N−2)/(2−α)`.
//! Weighted norms transform with explicit factors:
//!
//! ```text
//! ∫ φ'² r^{N−1} dr      = (c^{N−2}/m) ∫ v'² t^w dt
//! ∫ φ² r^{N−1−α} dr     =  m c^{N−α}  ∫ v² t^w dt
//! ∫ φ^p r^{N−1} dr      =  m c^N      ∫ v^p t^{mN−1} dt
//! ```
//!
//! where `w = (2N−2−α)/(2−α)`; note `c^{N−2}/m = A m c^{N−α}`.

use num::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{self, Rational};
use crate::fit;
use crate::profile::{PhiProfile, VProfile};
use crate::quadrature::{self, Tolerance};

#[derive(Debug, Clone)]
pub struct Parameters {
    pub dim: u32,
    pub amplitude: f64,
    pub alpha: f64,
    pub power: f64,
    alpha_q: Rational,
    power_q: Rational,
}

impl PartialEq for Parameters {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.amplitude == other.amplitude
            && self.alpha_q == other.alpha_q
            && self.power_q == other.power_q
    }
}

fn validate(dim: u32, amplitude: f64, alpha: f64, power: f64) -> Result<()> {
    if dim < 3 {
        return domain(format!("dimension N must be >= 3, got {dim}"));
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return domain(format!("amplitude A must be positive, got {amplitude}"));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    if !(power.is_finite() && power > 2.0) {
        return domain(format!("p must exceed 2, got {power}"));
    }
    Ok(())
}

impl Parameters {
    /// Float inputs; `alpha` and `p` are read exactly through their shortest
    /// decimal form.
    pub fn new(dim: u32, amplitude: f64, alpha: f64, power: f64) -> Result<Self> {
        validate(dim, amplitude, alpha, power)?;
        Ok(Self {
            dim,
            amplitude,
            alpha,
            power,
            alpha_q: exact::from_f64(alpha)?,
            power_q: exact::from_f64(power)?,
        })
    }

    /// Exact `alpha` and `p`, e.g. `p = 10/3`.
    pub fn with_exact(dim: u32, amplitude: f64, alpha: Rational, power: Rational) -> Result<Self> {
        let (a, p) = (exact::to_f64(&alpha), exact::to_f64(&power));
        validate(dim, amplitude, a, p)?;
        Ok(Self { dim, amplitude, alpha: a, power: p, alpha_q: alpha, power_q: power })
    }

    /// Same `N`, `A`, `α` with a different exponent.
    pub fn with_power(&self, power: Rational) -> Result<Self> {
        Self::with_exact(self.dim, self.amplitude, self.alpha_q.clone(), power)
    }

    pub fn alpha_exact(&self) -> &Rational {
        &self.alpha_q
    }

    pub fn power_exact(&self) -> &Rational {
        &self.power_q
    }

    pub fn exact(&self) -> ExactExponents {
        ExactExponents::new(self.dim, self.alpha_q.clone(), self.power_q.clone())
    }

    fn n(&self) -> f64 {
        self.dim as f64
    }

    fn require_transform(&self) -> Result<()> {
        if self.alpha < 2.0 {
            Ok(())
        } else {
            domain(format!("the Bessel-variable transform needs alpha < 2, got {}", self.alpha))
        }
    }

    /// `ν = (N−2)/(2−α)`.
    pub fn nu(&self) -> Result<f64> {
        self.require_transform()?;
        Ok((self.n() - 2.0) / (2.0 - self.alpha))
    }

    /// `B = ((2−α)/(2A^{1/α}))^{2α/(2−α)}`.
    pub fn b_const(&self) -> Result<f64> {
        self.require_transform()?;
        let a = self.alpha;
        Ok(((2.0 - a) / (2.0 * self.amplitude.powf(1.0 / a))).powf(2.0 * a / (2.0 - a)))
    }

    /// `κ = 2α/(2−α)`, the power of `t` in front of the nonlinearity.
    pub fn kappa(&self) -> Result<f64> {
        self.require_transform()?;
        Ok(2.0 * self.alpha / (2.0 - self.alpha))
    }

    /// `(N+α)/(2−α)`, the weight of the kernels `I(t)`, `K(t)`.
    pub fn kernel_exponent(&self) -> Result<f64> {
        self.require_transform()?;
        Ok((self.n() + self.alpha) / (2.0 - self.alpha))
    }

    /// `(2N−2−α)/(2−α)`, the weight of the space `H`.
    pub fn weight_exponent(&self) -> Result<f64> {
        self.require_transform()?;
        Ok((2.0 * self.n() - 2.0 - self.alpha) / (2.0 - self.alpha))
    }

    /// `(c, m)` with `r = c t^m`.
    pub fn transform_scale(&self) -> Result<(f64, f64)> {
        self.require_transform()?;
        let a = self.alpha;
        let c = ((2.0 - a) / (2.0 * self.amplitude.sqrt())).powf(2.0 / (2.0 - a));
        Ok((c, 2.0 / (2.0 - a)))
    }

    pub fn two_star(&self) -> f64 {
        2.0 * self.n() / (self.n() - 2.0)
    }

    /// `2N/(N−α)`; `None` for `α ≥ N`.
    pub fn two_alpha(&self) -> Option<f64> {
        (self.alpha < self.n()).then(|| 2.0 * self.n() / (self.n() - self.alpha))
    }

    /// `2(2N−2+α)/(2N−2−α)`; `None` for `α ≥ 2N−2`.
    pub fn two_alpha_star(&self) -> Option<f64> {
        let n = self.n();
        (self.alpha < 2.0 * n - 2.0).then(|| 2.0 * (2.0 * n - 2.0 + self.alpha) / (2.0 * n - 2.0 - self.alpha))
    }

    /// `β = αp/(p−2)`.
    pub fn beta(&self) -> f64 {
        self.alpha * self.power / (self.power - 2.0)
    }

    /// `γ₁ = β/p + β/2 − N + 1`.
    pub fn gamma1(&self) -> f64 {
        let b = self.beta();
        b / self.power + b / 2.0 - self.n() + 1.0
    }

    /// `γ₂ = β(N−β)(β−2)/(2p)`.
    pub fn gamma2(&self) -> f64 {
        let b = self.beta();
        b * (self.n() - b) * (b - 2.0) / (2.0 * self.power)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ParamsFile = serde_json::from_str(text)?;
        raw.into_parameters()
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ParamsFile::from(self))?)
    }
}

/// A number in a parameter file: plain JSON number or a string such as `"10/3"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl ParamValue {
    fn exact(&self) -> Result<Rational> {
        match self {
            ParamValue::Number(x) => exact::from_f64(*x),
            ParamValue::Text(s) => exact::parse(s),
        }
    }
}

/// On-disk parameter file `{N, A, alpha, p}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsFile {
    #[serde(rename = "N")]
    pub dim: u32,
    #[serde(rename = "A")]
    pub amplitude: f64,
    pub alpha: ParamValue,
    pub p: ParamValue,
}

impl ParamsFile {
    pub fn into_parameters(self) -> Result<Parameters> {
        Parameters::with_exact(self.dim, self.amplitude, self.alpha.exact()?, self.p.exact()?)
    }
}

impl From<&Parameters> for ParamsFile {
    fn from(p: &Parameters) -> Self {
        let value = |x: f64, q: &Rational| match exact::from_f64(x) {
            Ok(ref d) if d == q => ParamValue::Number(x),
            _ => ParamValue::Text(q.to_string()),
        };
        ParamsFile {
            dim: p.dim,
            amplitude: p.amplitude,
            alpha: value(p.alpha, &p.alpha_q),
            p: value(p.power, &p.power_q),
        }
    }
}

/// Exponents in exact rational arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactExponents {
    pub dim: u32,
    pub alpha: Rational,
    pub power: Rational,
}

impl ExactExponents {
    pub fn new(dim: u32, alpha: Rational, power: Rational) -> Self {
        Self { dim, alpha, power }
    }

    fn n(&self) -> Rational {
        exact::int(self.dim as i64)
    }

    pub fn two_star(&self) -> Rational {
        exact::int(2) * self.n() / (self.n() - exact::int(2))
    }

    pub fn two_alpha(&self) -> Option<Rational> {
        (self.alpha < self.n()).then(|| exact::int(2) * self.n() / (self.n() - &self.alpha))
    }

    pub fn two_alpha_star(&self) -> Option<Rational> {
        let k = exact::int(2) * self.n() - exact::int(2);
        (self.alpha < k).then(|| exact::int(2) * (&k + &self.alpha) / (&k - &self.alpha))
    }

    pub fn nu(&self) -> Option<Rational> {
        let two = exact::int(2);
        (self.alpha < two).then(|| (self.n() - &two) / (&two - &self.alpha))
    }

    pub fn kernel_exponent(&self) -> Option<Rational> {
        let two = exact::int(2);
        (self.alpha < two).then(|| (self.n() + &self.alpha) / (&two - &self.alpha))
    }

    pub fn kappa(&self) -> Option<Rational> {
        let two = exact::int(2);
        (self.alpha < two).then(|| &two * &self.alpha / (&two - &self.alpha))
    }

    pub fn beta(&self) -> Rational {
        &self.alpha * &self.power / (&self.power - exact::int(2))
    }

    pub fn gamma1(&self) -> Rational {
        let b = self.beta();
        &b / &self.power + &b / exact::int(2) - self.n() + Rational::one()
    }

    /// `((2N−2−α)/(2(p−2)))(2_α* − p)`; `None` when `2_α*` is undefined.
    pub fn gamma1_factored(&self) -> Option<Rational> {
        let two = exact::int(2);
        let k = &two * self.n() - &two - &self.alpha;
        self.two_alpha_star()
            .map(|s| k / (&two * (&self.power - &two)) * (s - &self.power))
    }

    pub fn gamma2(&self) -> Rational {
        let b = self.beta();
        &b * (self.n() - &b) * (&b - exact::int(2)) / (exact::int(2) * &self.power)
    }

    /// `(α−β)/2 + β/p`, identically zero.
    pub fn middle_coefficient(&self) -> Rational {
        let b = self.beta();
        (&self.alpha - &b) / exact::int(2) + &b / &self.power
    }

    /// `(2*−1−p)(N−2) + β − 2`.
    pub fn vanishing_exponent(&self) -> Rational {
        let two = exact::int(2);
        (self.two_star() - Rational::one() - &self.power) * (self.n() - &two) + self.beta() - two
    }

    /// `0 < α < 2` and `2_α < p ≤ 2_α*`.
    pub fn in_obstruction_band(&self) -> bool {
        let two = exact::int(2);
        if !(self.alpha.is_positive() && self.alpha < two) {
            return false;
        }
        match (self.two_alpha(), self.two_alpha_star()) {
            (Some(lo), Some(hi)) => self.power > lo && self.power <= hi,
            _ => false,
        }
    }
}

/// All derived constants; transform-specific entries are `None` for `α ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub nu: Option<f64>,
    pub b_const: Option<f64>,
    pub kappa: Option<f64>,
    pub kernel_exponent: Option<f64>,
    pub weight_exponent: Option<f64>,
    pub two_star: f64,
    pub two_alpha: Option<f64>,
    pub two_alpha_star: Option<f64>,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

pub fn derive_constants(params: &Parameters) -> DerivedConstants {
    DerivedConstants {
        nu: params.nu().ok(),
        b_const: params.b_const().ok(),
        kappa: params.kappa().ok(),
        kernel_exponent: params.kernel_exponent().ok(),
        weight_exponent: params.weight_exponent().ok(),
        two_star: params.two_star(),
        two_alpha: params.two_alpha(),
        two_alpha_star: params.two_alpha_star(),
        beta: params.beta(),
        gamma1: params.gamma1(),
        gamma2: params.gamma2(),
    }
}

pub fn t_of_r(params: &Parameters, r: f64) -> Result<f64> {
    let (c, m) = params.transform_scale()?;
    crate::error::check_positive("r", r)?;
    Ok((r / c).powf(1.0 / m))
}

pub fn r_of_t(params: &Parameters, t: f64) -> Result<f64> {
    let (c, m) = params.transform_scale()?;
    crate::error::check_positive("t", t)?;
    Ok(c * t.powf(m))
}

/// `v(t) = φ(r(t))`, `v'(t) = φ'(r) r^{α/2}/√A`.
pub fn v_from_phi(params: &Parameters, phi: &PhiProfile) -> Result<VProfile> {
    let (c, m) = params.transform_scale()?;
    if phi.is_empty() {
        return domain("empty profile");
    }
    let grid = phi.grid.iter().map(|r| (r / c).powf(1.0 / m)).collect();
    let scale = params.amplitude.sqrt();
    let derivs = phi
        .grid
        .iter()
        .zip(&phi.derivative_values)
        .map(|(r, d)| d * r.powf(params.alpha / 2.0) / scale)
        .collect();
    VProfile::new(grid, phi.values.clone(), derivs)
}

/// `φ(r) = v(t(r))`, `φ'(r) = √A v'(t) r^{−α/2}`.
pub fn phi_from_v(params: &Parameters, v: &VProfile) -> Result<PhiProfile> {
    let (c, m) = params.transform_scale()?;
    if v.is_empty() {
        return domain("empty profile");
    }
    let grid: Vec<f64> = v.grid.iter().map(|t| c * t.powf(m)).collect();
    let scale = params.amplitude.sqrt();
    let derivs = grid
        .iter()
        .zip(&v.derivative_values)
        .map(|(r, d)| scale * d * r.powf(-params.alpha / 2.0))
        .collect();
    PhiProfile::new(grid, v.values.clone(), derivs)
}

/// Factors converting `t`-integrals into the `r`-integrals of the radial form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormFactors {
    /// `∫φ'² r^{N−1} dr = gradient · ∫v'² t^w dt`.
    pub gradient: f64,
    /// `∫φ² r^{N−1−α} dr = weighted_l2 · ∫v² t^w dt`.
    pub weighted_l2: f64,
    /// `∫φ^p r^{N−1} dr = lp · ∫v^p t^{mN−1} dt`.
    pub lp: f64,
}

pub fn norm_factors(params: &Parameters) -> Result<NormFactors> {
    let (c, m) = params.transform_scale()?;
    let n = params.n();
    Ok(NormFactors {
        gradient: c.powf(n - 2.0) / m,
        weighted_l2: m * c.powf(n - params.alpha),
        lp: m * c.powf(n),
    })
}

/// How an endpoint contribution was extrapolated.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndpointFit {
    Zero,
    /// `f ≈ C x^q`.
    Power { exponent: f64, contribution: f64 },
    /// `ln f ≈ a + b ln x − λ x`.
    Exponential { log_slope: f64, rate: f64, contribution: f64 },
    Divergent { exponent: f64, rate: f64 },
}

impl EndpointFit {
    pub fn contribution(&self) -> f64 {
        match self {
            EndpointFit::Zero => 0.0,
            EndpointFit::Power { contribution, .. } | EndpointFit::Exponential { contribution, .. } => *contribution,
            EndpointFit::Divergent { .. } => f64::INFINITY,
        }
    }
}

/// Grid points in the first (`head = true`) or last decade with a positive
/// sampled integrand.
fn decade_samples(grid: &[f64], f: &[f64], head: bool) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    grid.iter()
        .zip(f)
        .filter(|(x, y)| **y > 0.0 && if head { **x <= 10.0 * lo } else { **x >= hi / 10.0 })
        .map(|(x, y)| (*x, *y))
        .unzip()
}

const MIN_FIT_POINTS: usize = 6;

/// `∫_0^{x₀} f` from a power-law fit of the smallest decade.
pub fn head_extrapolation(grid: &[f64], f: &[f64]) -> Result<EndpointFit> {
    if f.iter().all(|y| *y == 0.0) {
        return Ok(EndpointFit::Zero);
    }
    let (x, y) = decade_samples(grid, f, true);
    if grid.len() < 2 || grid[grid.len() - 1] < 10.0 * grid[0] {
        return Err(Error::Inconclusive("grid spans less than a decade".into()));
    }
    if x.is_empty() {
        return Ok(EndpointFit::Zero);
    }
    if x.len() < MIN_FIT_POINTS {
        return Err(Error::Inconclusive(format!("only {} usable points in the first decade", x.len())));
    }
    let lx: Vec<f64> = x.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|y| y.ln()).collect();
    let line = fit::line(&lx, &ly)?;
    let q = line.coefficients[1];
    if q <= -1.0 {
        return Ok(EndpointFit::Divergent { exponent: q, rate: 0.0 });
    }
    let x0 = grid[0];
    let f0 = (line.coefficients[0] + q * x0.ln()).exp();
    Ok(EndpointFit::Power { exponent: q, contribution: f0 * x0 / (q + 1.0) })
}

/// `∫_{x₁}^∞ f` from an `a + b ln x − λ x` fit of the largest decade. A decay
/// rate with `λ x₁ < 1` is treated as a power law.
pub fn tail_extrapolation(grid: &[f64], f: &[f64]) -> Result<EndpointFit> {
    if f.iter().all(|y| *y == 0.0) {
        return Ok(EndpointFit::Zero);
    }
    if grid.len() < 2 || grid[grid.len() - 1] < 10.0 * grid[0] {
        return Err(Error::Inconclusive("grid spans less than a decade".into()));
    }
    let (x, y) = decade_samples(grid, f, false);
    if x.is_empty() {
        return Ok(EndpointFit::Zero);
    }
    if x.len() < MIN_FIT_POINTS {
        return Err(Error::Inconclusive(format!("only {} usable points in the last decade", x.len())));
    }
    let x1 = grid[grid.len() - 1];
    let rows: Vec<Vec<f64>> = x.iter().map(|&x| vec![1.0, x.ln(), -x]).collect();
    let ly: Vec<f64> = y.iter().map(|y| y.ln()).collect();
    let full = fit::least_squares(&rows, &ly)?;
    let (a, b, rate) = (full.coefficients[0], full.coefficients[1], full.coefficients[2]);
    if rate * x1 >= 1.0 {
        let integrand = |s: f64| (a + b * s.ln() - rate * s).exp();
        let q = quadrature::integrate_to_infinity(integrand, x1, Tolerance { abs: 1e-300, rel: 1e-10 })?;
        return Ok(EndpointFit::Exponential { log_slope: b, rate, contribution: q.value });
    }
    let lx: Vec<f64> = x.iter().map(|x| x.ln()).collect();
    let line = fit::line(&lx, &ly)?;
    let q = line.coefficients[1];
    if q >= -1.0 {
        return Ok(EndpointFit::Divergent { exponent: q, rate });
    }
    let f1 = (line.coefficients[0] + q * x1.ln()).exp();
    Ok(EndpointFit::Power { exponent: q, contribution: -f1 * x1 / (q + 1.0) })
}

/// A weighted integral over `(0, ∞)`: grid part plus both extrapolations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedIntegral {
    pub interior: f64,
    pub head: EndpointFit,
    pub tail: EndpointFit,
}

impl ExtendedIntegral {
    pub fn total(&self) -> f64 {
        self.interior + self.head.contribution() + self.tail.contribution()
    }

    pub fn is_finite(&self) -> bool {
        self.total().is_finite()
    }
}

/// `∫_0^∞ f(t, v, v') dt` for a nonnegative integrand sampled along `v`.
pub fn extended_integral(v: &VProfile, f: impl Fn(f64, f64, f64) -> f64) -> Result<ExtendedIntegral> {
    let samples: Vec<f64> = (0..v.len()).map(|i| f(v.grid[i], v.values[i], v.derivative_values[i])).collect();
    Ok(ExtendedIntegral {
        interior: v.integrate(v.first(), v.last(), &f)?,
        head: head_extrapolation(&v.grid, &samples)?,
        tail: tail_extrapolation(&v.grid, &samples)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    /// `∫ v² t^w dt < ∞`.
    pub in_weighted_l2: bool,
    /// `∫ v'² t^w dt < ∞`.
    pub in_weighted_l2_grad: bool,
    /// `∫ φ^p r^{N−1} dr < ∞`.
    pub in_lp_r: bool,
    pub norms: MembershipNorms,
    /// Set when an endpoint could not be fitted; the booleans are then `false`.
    pub inconclusive: Option<String>,
}

impl MembershipReport {
    pub fn in_h(&self) -> bool {
        self.in_weighted_l2 && self.in_weighted_l2_grad
    }
}

/// Squared norms; `∞` when an extrapolation diverges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipNorms {
    pub weighted_l2: f64,
    pub weighted_l2_grad: f64,
    /// `∫ φ^p r^{N−1} dr`, already in the `r` variable.
    pub lp_r: f64,
}

pub fn membership_report(params: &Parameters, v: &VProfile) -> Result<MembershipReport> {
    let w = params.weight_exponent()?;
    let factors = norm_factors(params)?;
    let (_, m) = params.transform_scale()?;
    let n = params.n();
    let p = params.power;
    if v.is_zero() {
        return Ok(MembershipReport {
            in_weighted_l2: true,
            in_weighted_l2_grad: true,
            in_lp_r: true,
            norms: MembershipNorms { weighted_l2: 0.0, weighted_l2_grad: 0.0, lp_r: 0.0 },
            inconclusive: None,
        });
    }
    let l2 = extended_integral(v, |t, y, _| y * y * t.powf(w));
    let grad = extended_integral(v, |t, _, d| d * d * t.powf(w));
    let lp = extended_integral(v, |t, y, _| y.abs().powf(p) * t.powf(m * n - 1.0));
    match (l2, grad, lp) {
        (Ok(l2), Ok(grad), Ok(lp)) => Ok(MembershipReport {
            in_weighted_l2: l2.is_finite(),
            in_weighted_l2_grad: grad.is_finite(),
            in_lp_r: lp.is_finite(),
            norms: MembershipNorms {
                weighted_l2: l2.total(),
                weighted_l2_grad: grad.total(),
                lp_r: factors.lp * lp.total(),
            },
            inconclusive: None,
        }),
        (a, b, c) => {
            let reason = [a.err(), b.err(), c.err()]
                .into_iter()
                .flatten()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            Ok(MembershipReport {
                in_weighted_l2: false,
                in_weighted_l2_grad: false,
                in_lp_r: false,
                norms: MembershipNorms { weighted_l2: f64::NAN, weighted_l2_grad: f64::NAN, lp_r: f64::NAN },
                inconclusive: Some(reason),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{default_grid, log_grid};
    use num::Zero;

    fn p(n: u32, a: f64, alpha: f64, power: f64) -> Parameters {
        Parameters::new(n, a, alpha, power).unwrap()
    }

    #[test]
    fn constants_at_reference_point() {
        let c = derive_constants(&p(3, 1.0, 1.0, 4.0));
        assert_eq!(c.nu, Some(1.0));
        assert!((c.b_const.unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(c.two_star, 6.0);
        assert_eq!(c.two_alpha, Some(3.0));
        assert!((c.two_alpha_star.unwrap() - 10.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.kernel_exponent, Some(4.0));
        assert_eq!(c.weight_exponent, Some(3.0));
    }

    #[test]
    fn beta_gammas_exact() {
        let q = p(3, 1.0, 1.0, 3.2).exact();
        assert_eq!(q.beta(), exact::ratio(8, 3));
        assert_eq!(q.gamma1(), exact::ratio(1, 6));
        assert_eq!(q.gamma1_factored(), Some(exact::ratio(1, 6)));
        // 8/3 · 1/3 · 2/3 / 6.4 = 5/54
        assert_eq!(q.gamma2(), exact::ratio(5, 54));
        let boundary = Parameters::with_exact(3, 1.0, exact::int(1), exact::ratio(10, 3)).unwrap();
        assert!(boundary.exact().gamma1().is_zero());
        assert!(boundary.gamma1().abs() < 1e-14);
    }

    #[test]
    fn alpha_two_has_no_transform() {
        let q = p(3, 1.0, 2.0, 6.0);
        assert!(q.nu().is_err());
        assert!(t_of_r(&q, 1.0).is_err());
        let c = derive_constants(&q);
        assert_eq!(c.nu, None);
        assert_eq!(c.two_alpha, Some(6.0));
        assert!(Parameters::new(3, 1.0, 1.0, 2.0).is_err());
        assert!(Parameters::new(2, 1.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn change_of_variables_examples() {
        let q = p(3, 1.0, 1.0, 4.0);
        assert!((t_of_r(&q, 4.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((r_of_t(&q, 2.0).unwrap() - 1.0).abs() < 1e-14);
        for &(a, alpha) in &[(0.3, 0.4), (2.0, 1.7), (5.0, 1.0)] {
            let q = p(4, a, alpha, 3.5);
            for &t in &[1e-4, 0.3, 7.0, 40.0] {
                let back = t_of_r(&q, r_of_t(&q, t).unwrap()).unwrap();
                assert!(((back - t) / t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn power_profile_maps_to_power_profile() {
        let q = p(3, 1.0, 1.0, 4.0);
        let phi = PhiProfile::from_fn(log_grid(1e-3, 10.0, 50), |r| r.powf(-0.25), |r| -0.25 * r.powf(-1.25)).unwrap();
        let v = v_from_phi(&q, &phi).unwrap();
        for (t, (y, d)) in v.grid.iter().zip(v.values.iter().zip(&v.derivative_values)) {
            assert!((y - (t / 2.0).powf(-0.5)).abs() < 1e-12 * y);
            let want = -0.5 * (t / 2.0).powf(-1.5) / 2.0;
            assert!((d - want).abs() < 1e-12 * want.abs());
        }
        let back = phi_from_v(&q, &v).unwrap();
        for i in 0..phi.len() {
            assert!((back.grid[i] - phi.grid[i]).abs() < 1e-12 * phi.grid[i]);
            assert!((back.derivative_values[i] - phi.derivative_values[i]).abs() < 1e-10 * phi.derivative_values[i].abs());
        }
    }

    #[test]
    fn gradient_norm_transport() {
        let q = p(3, 2.0, 0.8, 4.0);
        let v = VProfile::from_fn(log_grid(1e-5, 60.0, 3000), |t| (-t).exp(), |t| -(-t).exp()).unwrap();
        let phi = phi_from_v(&q, &v).unwrap();
        let w = q.weight_exponent().unwrap();
        let f = norm_factors(&q).unwrap();
        let tv = v.integrate(v.first(), v.last(), |t, _, d| d * d * t.powf(w)).unwrap();
        let rv = phi.integrate(phi.first(), phi.last(), |r, _, d| d * d * r.powi(2)).unwrap();
        assert!((rv - f.gradient * tv).abs() < 1e-8 * rv);
        let tl = v.integrate(v.first(), v.last(), |t, y, _| y * y * t.powf(w)).unwrap();
        let rl = phi.integrate(phi.first(), phi.last(), |r, y, _| y * y * r.powf(2.0 - 0.8)).unwrap();
        assert!((rl - f.weighted_l2 * tl).abs() < 1e-8 * rl);
    }

    #[test]
    fn membership_examples() {
        let q = p(3, 1.0, 1.0, 4.0);
        let e = VProfile::from_fn(default_grid(), |t| (-t).exp(), |t| -(-t).exp()).unwrap();
        let rep = membership_report(&q, &e).unwrap();
        assert!(rep.in_h() && rep.in_lp_r, "{rep:?}");
        // ∫ e^{-2t} t^3 = 3!/2^4
        assert!((rep.norms.weighted_l2 - 0.375).abs() < 1e-8);
        assert!((rep.norms.weighted_l2_grad - 0.375).abs() < 1e-8);

        let pw = VProfile::from_fn(default_grid(), |t| 1.0 / t, |t| -1.0 / (t * t)).unwrap();
        let rep = membership_report(&q, &pw).unwrap();
        assert!(!rep.in_weighted_l2);

        let z = VProfile::zero(default_grid()).unwrap();
        let rep = membership_report(&q, &z).unwrap();
        assert!(rep.in_h() && rep.in_lp_r && rep.norms.weighted_l2 == 0.0);
    }

    #[test]
    fn short_grid_is_inconclusive() {
        let q = p(3, 1.0, 1.0, 4.0);
        let v = VProfile::from_fn(log_grid(1.0, 3.0, 20), |t| (-t).exp(), |t| -(-t).exp()).unwrap();
        let rep = membership_report(&q, &v).unwrap();
        assert!(rep.inconclusive.is_some());
        assert!(!rep.in_h());
    }

    #[test]
    fn json_parameters() {
        let q = Parameters::from_json(r#"{"N": 3, "A": 1, "alpha": 1, "p": "10/3"}"#).unwrap();
        assert_eq!(q.power_exact(), &exact::ratio(10, 3));
        let text = q.to_json().unwrap();
        assert!(text.contains("10/3"));
        assert_eq!(Parameters::from_json(&text).unwrap(), q);
        let f = Parameters::from_json(r#"{"N": 3, "A": 1.5, "alpha": 0.5, "p": 3.2}"#).unwrap();
        assert_eq!(f.power_exact(), &exact::ratio(16, 5));
        assert!(Parameters::from_json(r#"{"N": 3, "A": 1, "alpha": 1, "p": 1.5}"#).is_err());
    }
}
