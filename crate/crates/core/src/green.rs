//! The linear general solution and the nonlinear Green's operator
//!
//! ```text
//! (Tv)(t) = (B/t^ν) { I_ν(t) ∫_t^∞ K(s) v^{p−1} ds + K_ν(t) ∫_0^t I(s) v^{p−1} ds }
//! ```
//!
//! with `I(s) = s^e I_ν(s)`, `K(s) = s^e K_ν(s)`, `e = (N+α)/(2−α)`.
//! Differentiating under the integrals the boundary terms cancel, leaving
//!
//! ```text
//! (Tv)'(t) = (B/t^ν) { I_{ν+1}(t) ∫_t^∞ K v^{p−1} − K_{ν+1}(t) ∫_0^t I v^{p−1} }.
//! ```
//!
//! On a grid the integrals are accumulated panel by panel with exponentially
//! scaled kernels, so `T` costs `O(n)` per application once the kernels at
//! the quadrature nodes are cached.

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::{eval_i, eval_i_scaled, eval_k, eval_k_scaled};
use crate::error::{check_positive, domain, Error, Result};
use crate::profile::{log_derivative, VProfile, DEFAULT_T_MAX, DEFAULT_T_MIN};
use crate::quadrature::{integrate_from_zero, integrate_to_infinity, panel_rule, Tolerance, PANEL_NODES};
use crate::scaling::{head_extrapolation, tail_extrapolation, EndpointFit, Parameters};

/// Largest grid point accepted by [`GreenOperator`]; beyond it the unscaled
/// endpoint fits would leave the normal `f64` range.
pub const MAX_GRID_T: f64 = 600.0;

/// Data of the linear problem `−v'' − (2ν+1)/t v' + v = g`.
#[derive(Debug, Clone)]
pub struct GeneralSolutionSpec {
    pub c1: f64,
    pub c2: f64,
    /// Samples of `g` (values) and `g'` (derivatives).
    pub forcing: VProfile,
}

/// `∫_1^t f`, with the sign convention of an oriented integral.
fn oriented(forcing: &VProfile, t: f64, f: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let kernel = |s: f64, g: f64, _: f64| f(s, g);
    let value = if t >= 1.0 {
        if t == 1.0 {
            0.0
        } else {
            forcing.integrate(1.0, t, kernel)?
        }
    } else {
        -forcing.integrate(t, 1.0, kernel)?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Quadrature(format!("non-finite kernel integral between 1 and {t:e}")))
    }
}

/// `(v(t), v'(t))` for
/// `v = t^{−ν}[(c₁ − ∫_1^t s^{1+ν}K_ν g) I_ν + (c₂ + ∫_1^t s^{1+ν}I_ν g) K_ν]`.
/// The forcing grid must cover both `1` and `t`.
pub fn general_solution_with_derivative(params: &Parameters, spec: &GeneralSolutionSpec, t: f64) -> Result<(f64, f64)> {
    check_positive("t", t)?;
    let nu = params.nu()?;
    let kint = oriented(&spec.forcing, t, |s, g| s.powf(1.0 + nu) * eval_k(nu, s).unwrap_or(f64::NAN) * g)?;
    let iint = oriented(&spec.forcing, t, |s, g| s.powf(1.0 + nu) * eval_i(nu, s).unwrap_or(f64::NAN) * g)?;
    let a = spec.c1 - kint;
    let b = spec.c2 + iint;
    let scale = t.powf(-nu);
    let value = scale * (a * eval_i(nu, t)? + b * eval_k(nu, t)?);
    let slope = scale * (a * eval_i(nu + 1.0, t)? - b * eval_k(nu + 1.0, t)?);
    Ok((value, slope))
}

pub fn general_solution(params: &Parameters, spec: &GeneralSolutionSpec, t: f64) -> Result<f64> {
    general_solution_with_derivative(params, spec, t).map(|(v, _)| v)
}

/// `t^{−ν}{ I_ν(t) ∫_t^∞ K(s) g(s) ds + K_ν(t) ∫_0^t I(s) g(s) ds }` for an
/// analytic `g` by adaptive quadrature (no factor `B`).
pub fn kernel_integral(params: &Parameters, t: f64, g: impl Fn(f64) -> f64 + Copy, tol: Tolerance) -> Result<f64> {
    check_positive("t", t)?;
    let nu = params.nu()?;
    let e = params.kernel_exponent()?;
    let ki = |s: f64| eval_k_scaled(nu, s).unwrap_or(f64::NAN);
    let ii = |s: f64| eval_i_scaled(nu, s).unwrap_or(f64::NAN);
    // I_ν(t)∫_t^∞ K g = Ĩ(t) ∫_t^∞ s^e K̃(s) e^{t−s} g(s) ds, similarly for the other half
    let inner = integrate_to_infinity(|s| s.powf(e) * ki(s) * (t - s).exp() * g(s), t, tol)?;
    let outer = integrate_from_zero(|s| s.powf(e) * ii(s) * (s - t).exp() * g(s), t, tol)?;
    let value = t.powf(-nu) * (eval_i_scaled(nu, t)? * inner.value + eval_k_scaled(nu, t)? * outer.value);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Quadrature(format!("kernel integral not finite at t = {t:e}")))
    }
}

/// `T` on a fixed grid, with Bessel kernels cached at every quadrature node.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    pub params: Parameters,
    grid: Vec<f64>,
    nu: f64,
    b: f64,
    e: f64,
    /// Scaled `I_ν, K_ν, I_{ν+1}, K_{ν+1}` at the grid points.
    i0: Vec<f64>,
    k0: Vec<f64>,
    i1: Vec<f64>,
    k1: Vec<f64>,
    /// Per panel: node positions, and quadrature weights already multiplied
    /// by `s^e K̃(s) e^{t_i − s}` and `s^e Ĩ(s) e^{s − t_{i+1}}` respectively.
    nodes: Vec<[f64; PANEL_NODES]>,
    wk: Vec<[f64; PANEL_NODES]>,
    wi: Vec<[f64; PANEL_NODES]>,
}

/// One application of `T`, with the endpoint extrapolations it used.
#[derive(Debug, Clone)]
pub struct Application {
    pub image: VProfile,
    pub head: EndpointFit,
    pub tail: EndpointFit,
}

impl GreenOperator {
    pub fn new(params: &Parameters, grid: Vec<f64>) -> Result<Self> {
        let nu = params.nu()?;
        let b = params.b_const()?;
        let e = params.kernel_exponent()?;
        let probe = VProfile::zero(grid.clone())?;
        if probe.len() < 12 {
            return domain("the operator grid needs at least 12 points");
        }
        if probe.last() > MAX_GRID_T {
            return domain(format!("grid extends to {:e}, beyond the supported {MAX_GRID_T}", probe.last()));
        }
        let kernels = |t: f64| -> Result<[f64; 4]> {
            Ok([eval_i_scaled(nu, t)?, eval_k_scaled(nu, t)?, eval_i_scaled(nu + 1.0, t)?, eval_k_scaled(nu + 1.0, t)?])
        };
        let at_grid: Vec<[f64; 4]> = grid.par_iter().map(|&t| kernels(t)).collect::<Result<_>>()?;
        let (z, w) = panel_rule();
        let panels: Vec<_> = (0..grid.len() - 1)
            .into_par_iter()
            .map(|i| -> Result<_> {
                let (lo, hi) = (grid[i], grid[i + 1]);
                let (ul, uh) = (lo.ln(), hi.ln());
                let half = 0.5 * (uh - ul);
                let mid = 0.5 * (uh + ul);
                let mut nodes = [0.0; PANEL_NODES];
                let mut wk = [0.0; PANEL_NODES];
                let mut wi = [0.0; PANEL_NODES];
                for j in 0..PANEL_NODES {
                    let s = (mid + half * z[j]).exp();
                    let jac = w[j] * half * s * s.powf(e);
                    nodes[j] = s;
                    wk[j] = jac * eval_k_scaled(nu, s)? * (lo - s).exp();
                    wi[j] = jac * eval_i_scaled(nu, s)? * (s - hi).exp();
                }
                Ok((nodes, wk, wi))
            })
            .collect::<Result<_>>()?;
        let mut op = GreenOperator {
            params: params.clone(),
            nu,
            b,
            e,
            i0: Vec::with_capacity(grid.len()),
            k0: Vec::with_capacity(grid.len()),
            i1: Vec::with_capacity(grid.len()),
            k1: Vec::with_capacity(grid.len()),
            nodes: Vec::with_capacity(panels.len()),
            wk: Vec::with_capacity(panels.len()),
            wi: Vec::with_capacity(panels.len()),
            grid,
        };
        for k in at_grid {
            op.i0.push(k[0]);
            op.k0.push(k[1]);
            op.i1.push(k[2]);
            op.k1.push(k[3]);
        }
        for (n, a, b) in panels {
            op.nodes.push(n);
            op.wk.push(a);
            op.wi.push(b);
        }
        Ok(op)
    }

    /// The default grid: 2048 log-spaced points on `[1e-4, 50]`.
    pub fn with_default_grid(params: &Parameters) -> Result<Self> {
        Self::new(params, crate::profile::default_grid())
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn check_profile(&self, v: &VProfile) -> Result<()> {
        if v.grid.len() != self.grid.len() || v.grid.iter().zip(&self.grid).any(|(a, b)| (a - b).abs() > 1e-13 * b) {
            return domain("profile grid differs from the operator grid");
        }
        if let Some(i) = v.values.iter().position(|&x| x < 0.0) {
            return domain(format!("negative value v({:e}) = {:e}", v.grid[i], v.values[i]));
        }
        Ok(())
    }

    pub fn apply(&self, v: &VProfile) -> Result<VProfile> {
        self.apply_detailed(v).map(|a| a.image)
    }

    pub fn apply_detailed(&self, v: &VProfile) -> Result<Application> {
        self.check_profile(v)?;
        let n = self.grid.len();
        let q = self.params.power - 1.0;
        if v.is_zero() {
            return Ok(Application { image: VProfile::zero(self.grid.clone())?, head: EndpointFit::Zero, tail: EndpointFit::Zero });
        }
        // per-panel scaled contributions
        let parts: Vec<(f64, f64)> = (0..n - 1)
            .into_par_iter()
            .map(|i| {
                let (mut a, mut b) = (0.0, 0.0);
                for j in 0..PANEL_NODES {
                    let g = v.value_in_panel(i, self.nodes[i][j]).max(0.0).powf(q);
                    a += self.wk[i][j] * g;
                    b += self.wi[i][j] * g;
                }
                (a, b)
            })
            .collect();
        let g_grid: Vec<f64> = v.values.iter().map(|x| x.powf(q)).collect();
        let head_samples: Vec<f64> = self
            .grid
            .iter()
            .zip(&g_grid)
            .map(|(&t, g)| t.powf(self.e) * eval_i(self.nu, t).unwrap_or(0.0) * g)
            .collect();
        let tail_samples: Vec<f64> = self
            .grid
            .iter()
            .zip(&g_grid)
            .map(|(&t, g)| t.powf(self.e) * eval_k(self.nu, t).unwrap_or(0.0) * g)
            .collect();
        let head = head_extrapolation(&self.grid, &head_samples)?;
        let tail = tail_extrapolation(&self.grid, &tail_samples)?;
        if let EndpointFit::Divergent { exponent, .. } = &head {
            return Err(Error::Divergent(format!(
                "head integrand I(s)v^(p-1) behaves like s^{exponent:.3}, not integrable at 0"
            )));
        }
        match &tail {
            EndpointFit::Zero | EndpointFit::Exponential { .. } => {}
            other => {
                return Err(Error::Divergent(format!(
                    "tail integrand K(s)v^(p-1) shows no exponential decay on the last decade ({other:?})"
                )))
            }
        }
        let (t0, tn) = (self.grid[0], self.grid[n - 1]);
        // S_j = e^{t_j} ∫_{t_j}^∞ K g,   U_j = e^{−t_j} ∫_0^{t_j} I g
        let mut s = vec![0.0; n];
        let mut u = vec![0.0; n];
        s[n - 1] = tail.contribution() * tn.exp();
        for j in (0..n - 1).rev() {
            s[j] = parts[j].0 + (self.grid[j] - self.grid[j + 1]).exp() * s[j + 1];
        }
        u[0] = head.contribution() * (-t0).exp();
        for j in 0..n - 1 {
            u[j + 1] = (self.grid[j] - self.grid[j + 1]).exp() * u[j] + parts[j].1;
        }
        let mut values = Vec::with_capacity(n);
        let mut derivs = Vec::with_capacity(n);
        for j in 0..n {
            let pre = self.b * self.grid[j].powf(-self.nu);
            values.push(pre * (self.i0[j] * s[j] + self.k0[j] * u[j]));
            derivs.push(pre * (self.i1[j] * s[j] - self.k1[j] * u[j]));
        }
        Ok(Application { image: VProfile::new(self.grid.clone(), values, derivs)?, head, tail })
    }
}

/// `T v` for a profile, building the operator on the profile's own grid.
pub fn apply_operator(params: &Parameters, v: &VProfile) -> Result<VProfile> {
    GreenOperator::new(params, v.grid.clone())?.apply(v)
}

/// Finite-difference residual of `−v'' − (2ν+1)/t v' + v = rhs(t, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeResidual {
    pub sup_abs: f64,
    /// `sup_abs / sup |v|` over the window.
    pub relative: f64,
    pub window: (f64, f64),
}

pub const RESIDUAL_WINDOW: (f64, f64) = (0.05, 10.0);

pub fn ode_residual_with(params: &Parameters, v: &VProfile, window: (f64, f64), rhs: impl Fn(f64, f64) -> f64) -> Result<OdeResidual> {
    let nu = params.nu()?;
    let second = log_derivative(&v.grid, &v.derivative_values)?;
    let mut sup_abs: f64 = 0.0;
    let mut sup_v: f64 = 0.0;
    let mut any = false;
    // skip the two outermost points, whose one-sided stencils are less accurate
    for i in 2..v.len().saturating_sub(2) {
        let t = v.grid[i];
        if t < window.0 || t > window.1 {
            continue;
        }
        any = true;
        let y = v.values[i];
        let r = -second[i] - (2.0 * nu + 1.0) / t * v.derivative_values[i] + y - rhs(t, y);
        sup_abs = sup_abs.max(r.abs());
        sup_v = sup_v.max(y.abs());
    }
    if !any {
        return domain(format!("no grid points inside the residual window [{}, {}]", window.0, window.1));
    }
    let relative = if sup_v > 0.0 { sup_abs / sup_v } else { sup_abs };
    Ok(OdeResidual { sup_abs, relative, window })
}

/// Residual of the nonlinear problem `−v'' − (2ν+1)/t v' + v = B t^κ v^{p−1}`.
pub fn ode_residual(params: &Parameters, v: &VProfile, window: (f64, f64)) -> Result<OdeResidual> {
    let b = params.b_const()?;
    let kappa = params.kappa()?;
    let q = params.power - 1.0;
    ode_residual_with(params, v, window, |t, y| b * t.powf(kappa) * y.abs().powf(q) * y.signum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// `λ` in `v ← (1−λ)v + λ·S(v)`.
    pub damping: f64,
    /// Rescale `Tv` by `M^{(p−1)/(p−2)}`, `M = ⟨v,v⟩/⟨v,Tv⟩`, before mixing.
    pub stabilize: bool,
    /// Bound on the relative ODE residual required of a converged profile.
    pub ode_tol: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self { max_iter: 500, tol: 1e-8, damping: 1.0, stabilize: true, ode_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointStatus {
    Converged,
    /// `|Tv − v|` met the tolerance but the ODE residual check failed.
    Unverified,
    MaxIterations,
    /// The sup norm exceeded `1e8`.
    Diverged,
    /// The iterate is (or collapsed to) zero.
    Trivial,
    /// `T` could not be applied (e.g. non-integrable endpoint behaviour).
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointResult {
    #[serde(skip)]
    pub profile: VProfile,
    /// `sup |Tv − v|` for the returned profile.
    pub residual_sup: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: FixedPointStatus,
    pub ode_residual: Option<OdeResidual>,
    /// Last value of the stabilizing factor `M^{(p−1)/(p−2)}`.
    pub scale_factor: f64,
    pub message: Option<String>,
}

pub const DIVERGENCE_BOUND: f64 = 1e8;
pub const TRIVIAL_BOUND: f64 = 1e-12;

/// `∫ a b t^{2ν+1} dt` by the trapezoid rule in `ln t`.
fn weighted_dot(grid: &[f64], nu: f64, a: &[f64], b: &[f64]) -> f64 {
    let f: Vec<f64> = (0..grid.len()).map(|i| a[i] * b[i] * grid[i].powf(2.0 * nu + 2.0)).collect();
    grid.windows(2)
        .enumerate()
        .map(|(i, w)| 0.5 * (f[i] + f[i + 1]) * (w[1] / w[0]).ln())
        .sum()
}

pub fn fixed_point_solve(params: &Parameters, init: &VProfile, options: FixedPointOptions) -> Result<FixedPointResult> {
    let op = GreenOperator::new(params, init.grid.clone())?;
    fixed_point_solve_with(&op, init, options)
}

pub fn fixed_point_solve_with(op: &GreenOperator, init: &VProfile, options: FixedPointOptions) -> Result<FixedPointResult> {
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return domain(format!("damping must lie in (0, 1], got {}", options.damping));
    }
    if init.values.iter().any(|&x| x < 0.0) {
        return domain("initial profile must be nonnegative");
    }
    let params = &op.params;
    let nu = op.nu;
    let gamma = (params.power - 1.0) / (params.power - 2.0);
    let lambda = options.damping;
    let mut v = init.clone();
    let finish = |v: VProfile, residual: f64, it: usize, status: FixedPointStatus, factor: f64, msg: Option<String>| {
        let ode = if matches!(status, FixedPointStatus::Converged) { ode_residual(params, &v, RESIDUAL_WINDOW).ok() } else { None };
        let status = match (status, ode) {
            (FixedPointStatus::Converged, Some(r)) if r.relative <= options.ode_tol => FixedPointStatus::Converged,
            (FixedPointStatus::Converged, _) => FixedPointStatus::Unverified,
            (s, _) => s,
        };
        FixedPointResult {
            profile: v,
            residual_sup: residual,
            iterations: it,
            converged: status == FixedPointStatus::Converged,
            status,
            ode_residual: ode,
            scale_factor: factor,
            message: msg,
        }
    };
    if v.sup_norm() < TRIVIAL_BOUND {
        let zero = VProfile::zero(v.grid.clone())?;
        return Ok(finish(zero, 0.0, 0, FixedPointStatus::Trivial, 1.0, Some("initial profile is zero".into())));
    }
    let mut factor = 1.0;
    for it in 0..options.max_iter {
        let tv = match op.apply(&v) {
            Ok(tv) => tv,
            Err(e) => return Ok(finish(v, f64::NAN, it, FixedPointStatus::Failed, factor, Some(e.to_string()))),
        };
        let residual = v.values.iter().zip(&tv.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if residual <= options.tol {
            return Ok(finish(v, residual, it, FixedPointStatus::Converged, factor, None));
        }
        factor = if options.stabilize {
            let num = weighted_dot(&v.grid, nu, &v.values, &v.values);
            let den = weighted_dot(&v.grid, nu, &v.values, &tv.values);
            if den > 0.0 {
                (num / den).powf(gamma)
            } else {
                1.0
            }
        } else {
            1.0
        };
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| (1.0 - lambda) * x + lambda * factor * y).collect() };
        let values = mix(&v.values, &tv.values);
        let derivs = mix(&v.derivative_values, &tv.derivative_values);
        v = VProfile::new(v.grid.clone(), values, derivs)?;
        let sup = v.sup_norm();
        if !(sup <= DIVERGENCE_BOUND) {
            return Ok(finish(v, residual, it + 1, FixedPointStatus::Diverged, factor, Some(format!("sup norm {sup:e}"))));
        }
        if sup < TRIVIAL_BOUND {
            let zero = VProfile::zero(v.grid.clone())?;
            return Ok(finish(zero, 0.0, it + 1, FixedPointStatus::Trivial, factor, Some("iterates collapsed to zero".into())));
        }
    }
    let tv = op.apply(&v)?;
    let residual = v.values.iter().zip(&tv.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(finish(v, residual, options.max_iter, FixedPointStatus::MaxIterations, factor, None))
}

/// `e^{−t}` on the default grid.
pub fn expdecay_init() -> Result<VProfile> {
    VProfile::from_fn(crate::profile::log_grid(DEFAULT_T_MIN, DEFAULT_T_MAX, crate::profile::DEFAULT_POINTS), |t| (-t).exp(), |t| -(-t).exp())
}
