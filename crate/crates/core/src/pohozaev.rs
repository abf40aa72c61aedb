//! Energy along the radial equation, the identity obtained by testing it with
//! `r^{β−1}φ`, and the sign obstruction in the band `2_α < p ≤ 2_α*`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exact;
use crate::profile::{log_derivative, PhiProfile};
use crate::scaling::{tail_extrapolation, EndpointFit, Parameters};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRecord {
    pub r: f64,
    /// `½φ'² − ½(A/r^α)φ² + (1/p)φ^p`.
    #[serde(rename = "E")]
    pub e: f64,
    /// `r^β E`.
    #[serde(rename = "E_beta")]
    pub e_beta: f64,
}

fn energy_density(params: &Parameters, r: f64, y: f64, d: f64) -> f64 {
    0.5 * d * d - 0.5 * params.amplitude * r.powf(-params.alpha) * y * y + y.abs().powf(params.power) / params.power
}

pub fn energy(params: &Parameters, phi: &PhiProfile, r: f64) -> Result<EnergyRecord> {
    let y = phi.value_at(r)?;
    let d = phi.derivative_at(r)?;
    let e = energy_density(params, r, y, d);
    Ok(EnergyRecord { r, e, e_beta: r.powf(params.beta()) * e })
}

/// `sup |E' − (−(N−1)/r φ'² + (α/2)(A/r^{α+1})φ²)|`, relative to the sup of
/// the right side, over grid points in `[lo, hi]`; `E'` by finite differences.
pub fn energy_balance(params: &Parameters, phi: &PhiProfile, lo: f64, hi: f64) -> Result<f64> {
    let es: Vec<f64> = (0..phi.len())
        .map(|i| energy_density(params, phi.grid[i], phi.values[i], phi.derivative_values[i]))
        .collect();
    let de = log_derivative(&phi.grid, &es)?;
    let (n, a, al) = (params.dim as f64, params.amplitude, params.alpha);
    let (mut gap, mut scale): (f64, f64) = (0.0, 0.0);
    for i in 2..phi.len().saturating_sub(2) {
        let r = phi.grid[i];
        if r < lo || r > hi {
            continue;
        }
        let (y, d) = (phi.values[i], phi.derivative_values[i]);
        let want = -(n - 1.0) / r * d * d + 0.5 * al * a * r.powf(-al - 1.0) * y * y;
        gap = gap.max((de[i] - want).abs());
        scale = scale.max(want.abs());
    }
    if scale == 0.0 {
        return Ok(gap);
    }
    Ok(gap / scale)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    /// `γ₁∫r^{β−1}φ'² + A((α−β)/2 + β/p)∫r^{β−α−1}φ² + γ₂∫r^{β−3}φ²` over `[a, b]`.
    pub lhs: f64,
    /// `(β/p)[r^{β−1}φ'φ − ((β−N)/2)r^{β−2}φ²]_a^b + E_β(b) − E_β(a)`.
    pub rhs: f64,
    pub residual: f64,
    /// `|residual| / max(|lhs|, |rhs|)`.
    pub normalized: f64,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

/// The bracketed boundary terms of the identity plus `E_β` at `r`.
fn boundary(params: &Parameters, r: f64, y: f64, d: f64) -> f64 {
    let (n, p, beta) = (params.dim as f64, params.power, params.beta());
    beta / p * (r.powf(beta - 1.0) * d * y - 0.5 * (beta - n) * r.powf(beta - 2.0) * y * y)
        + r.powf(beta) * energy_density(params, r, y, d)
}

pub fn identity_residual(params: &Parameters, phi: &PhiProfile, a: f64, b: f64) -> Result<IdentityReport> {
    if !(a < b) {
        return domain(format!("need a < b, got a = {a}, b = {b}"));
    }
    let e = params.exact();
    let middle = e.middle_coefficient();
    if middle != exact::int(0) {
        return Err(Error::Domain(format!("(alpha-beta)/2 + beta/p = {middle} is not zero")));
    }
    let beta = params.beta();
    let (g1, g2) = (params.gamma1(), params.gamma2());
    let mid = params.amplitude * exact::to_f64(&middle);
    let al = params.alpha;
    let lhs = phi.integrate(a, b, |r, y, d| {
        g1 * r.powf(beta - 1.0) * d * d + mid * r.powf(beta - al - 1.0) * y * y + g2 * r.powf(beta - 3.0) * y * y
    })?;
    let rhs = boundary(params, b, phi.value_at(b)?, phi.derivative_at(b)?)
        - boundary(params, a, phi.value_at(a)?, phi.derivative_at(a)?);
    let residual = lhs - rhs;
    let denom = lhs.abs().max(rhs.abs());
    let normalized = if denom > 0.0 { residual.abs() / denom } else { residual.abs() };
    Ok(IdentityReport { lhs, rhs, residual, normalized, a, b, beta, gamma1: g1, gamma2: g2 })
}

/// `F(a)` as the raw right side after `b → ∞`.
pub fn f_raw(params: &Parameters, a: f64, y: f64, d: f64) -> f64 {
    -boundary(params, a, y, d)
}

/// `−½a^{β−2}(aφ' + (β/p)φ)² − (1/p)a^β φ^p`, the completed square without
/// its vanishing remainder.
pub fn f_completed(params: &Parameters, a: f64, y: f64, d: f64) -> f64 {
    let (p, beta) = (params.power, params.beta());
    let s = a * d + beta / p * y;
    -0.5 * a.powf(beta - 2.0) * s * s - a.powf(beta) * y.abs().powf(p) / p
}

/// `F(a) − f_completed`: `(β²/p² − β(N−β)/p)a^{β−2}φ²/2 + (A/2)a^{β−α}φ²`.
pub fn f_remainder(params: &Parameters, a: f64, y: f64) -> f64 {
    let (n, p, beta) = (params.dim as f64, params.power, params.beta());
    0.5 * (beta * beta / (p * p) - beta * (n - beta) / p) * a.powf(beta - 2.0) * y * y
        + 0.5 * params.amplitude * a.powf(beta - params.alpha) * y * y
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryLimit {
    /// `|boundary terms|` at the ends of the three largest decades.
    pub samples: [(f64, f64); 3],
    /// Strictly decreasing samples, the gate for taking `b → ∞`.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Obstruction {
    pub a: f64,
    /// `γ₁∫_a^∞ r^{β−1}φ'² + γ₂∫_a^∞ r^{β−3}φ²`.
    pub lhs_tail: f64,
    /// Completed-square form of `F(a)`.
    #[serde(rename = "F_a")]
    pub f_a: f64,
    /// Raw right side, `f_a` plus its remainder.
    pub f_a_raw: f64,
    /// `lhs_tail − F_a`.
    pub contradiction_margin: f64,
    /// `lhs_tail − f_a_raw`, zero for a true solution once `b → ∞` is taken.
    pub identity_gap: f64,
    pub boundary_limit: BoundaryLimit,
    pub head_tail: [EndpointFit; 2],
}

pub fn obstruction(params: &Parameters, phi: &PhiProfile, a: f64) -> Result<Obstruction> {
    if !params.exact().in_obstruction_band() {
        return domain(format!(
            "the obstruction needs 0 < alpha < 2 and 2_alpha < p <= 2_alpha*, got alpha = {}, p = {}",
            params.alpha, params.power
        ));
    }
    let beta = params.beta();
    let (g1, g2) = (params.gamma1(), params.gamma2());
    let r_max = phi.last();
    if r_max < 1000.0 * phi.first() || a >= r_max / 1000.0 {
        return domain("need three grid decades above a");
    }
    let integrands = [
        Box::new(|r: f64, _: f64, d: f64| r.powf(beta - 1.0) * d * d) as Box<dyn Fn(f64, f64, f64) -> f64>,
        Box::new(|r: f64, y: f64, _: f64| r.powf(beta - 3.0) * y * y),
    ];
    let mut parts = [0.0; 2];
    let mut fits = [EndpointFit::Zero, EndpointFit::Zero];
    for (k, f) in integrands.iter().enumerate() {
        let interior = phi.integrate(a, r_max, f)?;
        let (grid, samples): (Vec<f64>, Vec<f64>) = (0..phi.len())
            .filter(|&i| phi.grid[i] >= a)
            .map(|i| (phi.grid[i], f(phi.grid[i], phi.values[i], phi.derivative_values[i])))
            .unzip();
        fits[k] = tail_extrapolation(&grid, &samples)?;
        parts[k] = interior + fits[k].contribution();
    }
    let lhs_tail = g1 * parts[0] + g2 * parts[1];
    let (ya, da) = (phi.value_at(a)?, phi.derivative_at(a)?);
    let f_a = f_completed(params, a, ya, da);
    let f_a_raw = f_raw(params, a, ya, da);
    let mut samples = [(0.0, 0.0); 3];
    for (k, r) in [r_max / 100.0, r_max / 10.0, r_max].into_iter().enumerate() {
        samples[k] = (r, boundary(params, r, phi.value_at(r)?, phi.derivative_at(r)?).abs());
    }
    let monotone = samples[0].1 > samples[1].1 && samples[1].1 > samples[2].1;
    let [f0, f1] = fits;
    Ok(Obstruction {
        a,
        lhs_tail,
        f_a,
        f_a_raw,
        contradiction_margin: lhs_tail - f_a,
        identity_gap: lhs_tail - f_a_raw,
        boundary_limit: BoundaryLimit { samples, monotone },
        head_tail: [f0, f1],
    })
}
