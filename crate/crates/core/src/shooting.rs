//! Shooting on `−v'' − (2ν+1)/t v' + v = B t^κ v^{p−1}` from the regular
//! branch at the origin, trajectory classification and ground-state bisection.

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::eval_k;
use crate::error::{domain, Error, Result};
use crate::fit;
use crate::ode::{self, bisect_root, Control, Dopri5Options, Termination};
use crate::profile::{log_grid, VProfile, DEFAULT_POINTS, DEFAULT_T_MAX, DEFAULT_T_MIN};
use crate::scaling::Parameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// `v` reaches zero at a finite `t`.
    Crossing,
    /// `v` has a positive local minimum or exceeds the growth bound.
    Growing,
    /// `v` decays with log-slope below `−0.5` over the last decade.
    Decaying,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingOptions {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub rtol: f64,
    pub atol: f64,
    /// `|v| > growth_factor · v0` declares `Growing`.
    pub growth_factor: f64,
    /// Drop the nonlinear term (a check against `t^{−ν} I_ν`).
    pub linear: bool,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            t_min: DEFAULT_T_MIN,
            t_max: DEFAULT_T_MAX,
            points: DEFAULT_POINTS,
            rtol: 1e-10,
            atol: 1e-12,
            growth_factor: 1e6,
            linear: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    #[serde(skip)]
    pub profile: VProfile,
    pub v0: f64,
    pub classification: Classification,
    pub event_t: Option<f64>,
    pub steps: usize,
    pub diagnostic: Option<String>,
}

/// Slope threshold for `Decaying`.
pub const DECAY_SLOPE: f64 = -0.5;

struct Model {
    nu: f64,
    b: f64,
    kappa: f64,
    q: f64,
}

impl Model {
    fn new(params: &Parameters, linear: bool) -> Result<Self> {
        Ok(Self {
            nu: params.nu()?,
            b: if linear { 0.0 } else { params.b_const()? },
            kappa: params.kappa()?,
            q: params.power - 1.0,
        })
    }

    fn rhs(&self, t: f64, y: &[f64; 2]) -> [f64; 2] {
        let v = y[0];
        let nonlinear = self.b * t.powf(self.kappa) * v.abs().powf(self.q) * v.signum();
        [y[1], -(2.0 * self.nu + 1.0) / t * y[1] + v - nonlinear]
    }

    /// Regular solution near the origin:
    /// `v ≈ v0(1 + t²/(4(ν+1))) − B v0^{p−1} t^{κ+2}/((κ+2)(κ+2+2ν))`.
    fn initial(&self, v0: f64, t: f64) -> [f64; 2] {
        let k2 = self.kappa + 2.0;
        let n = self.b * v0.powf(self.q);
        [
            v0 * (1.0 + t * t / (4.0 * (self.nu + 1.0))) - n * t.powf(k2) / (k2 * (k2 + 2.0 * self.nu)),
            v0 * t / (2.0 * (self.nu + 1.0)) - n * t.powf(k2 - 1.0) / (k2 + 2.0 * self.nu),
        ]
    }
}

pub fn integrate_v(params: &Parameters, v0: f64, options: &ShootingOptions) -> Result<Trajectory> {
    if !(v0 >= 0.0 && v0.is_finite()) {
        return domain(format!("v0 must be finite and >= 0, got {v0}"));
    }
    if !(options.t_min > 0.0 && options.t_max > options.t_min) || options.points < 2 {
        return domain(format!("bad shooting span [{}, {}] x {}", options.t_min, options.t_max, options.points));
    }
    let model = Model::new(params, options.linear)?;
    let grid = log_grid(options.t_min, options.t_max, options.points);
    if v0 == 0.0 {
        return Ok(Trajectory {
            profile: VProfile::zero(grid)?,
            v0,
            classification: Classification::Decaying,
            event_t: None,
            steps: 0,
            diagnostic: Some("zero initial value gives the trivial solution".into()),
        });
    }
    let y0 = model.initial(v0, options.t_min);
    let mut values = vec![y0[0]];
    let mut derivs = vec![y0[1]];
    let mut next = 1;
    let mut event: Option<(Classification, f64)> = None;
    let bound = options.growth_factor * v0;
    let ode_opts = Dopri5Options { rtol: options.rtol, atol: options.atol, ..Default::default() };
    let outcome = ode::integrate(
        |t, y| model.rhs(t, y),
        options.t_min,
        y0,
        options.t_max,
        &ode_opts,
        |s| {
            let interp = |t: f64| s.interpolate_second_order(0, t);
            let mut stop_at = f64::INFINITY;
            if s.y1[0] <= 0.0 {
                let t = bisect_root(s.t0, s.t1, |t| interp(t).0);
                event = Some((Classification::Crossing, t));
                stop_at = t;
            } else if s.y0[1] < 0.0 && s.y1[1] >= 0.0 {
                let t = bisect_root(s.t0, s.t1, |t| interp(t).1);
                event = Some((Classification::Growing, t));
                stop_at = t;
            } else if s.y1[0].abs() > bound {
                event = Some((Classification::Growing, s.t1));
                stop_at = s.t1;
            }
            while next < grid.len() && grid[next] <= s.t1 && grid[next] < stop_at {
                let (v, d) = interp(grid[next]);
                values.push(v);
                derivs.push(d);
                next += 1;
            }
            if event.is_some() {
                Control::Stop
            } else {
                Control::Continue
            }
        },
    )?;
    let kept: Vec<f64> = grid[..values.len()].to_vec();
    let profile = VProfile::new(kept, values, derivs)?;
    let (classification, event_t, diagnostic) = match (event, outcome.termination) {
        (Some((c, t)), _) => (c, Some(t), None),
        (None, Termination::Completed) => match decay_slope(&profile) {
            Some(slope) if slope < DECAY_SLOPE => (Classification::Decaying, None, None),
            Some(slope) => (Classification::Inconclusive, None, Some(format!("last-decade log-slope {slope:.3}"))),
            None => (Classification::Inconclusive, None, Some("too few samples to fit the tail".into())),
        },
        (None, other) => (Classification::Inconclusive, Some(outcome.t), Some(format!("integration ended early: {other:?} at t = {:e}", outcome.t))),
    };
    Ok(Trajectory { profile, v0, classification, event_t, steps: outcome.steps, diagnostic })
}

/// Fitted `d ln v / d ln t` over the last decade of a positive profile.
fn decay_slope(v: &VProfile) -> Option<f64> {
    let hi = v.last();
    let (x, y): (Vec<f64>, Vec<f64>) = v
        .grid
        .iter()
        .zip(&v.values)
        .filter(|(t, y)| **t >= hi / 10.0 && **y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .unzip();
    fit::line(&x, &y).ok().map(|f| f.coefficients[1])
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundState {
    pub v0: f64,
    pub bracket: (f64, f64),
    /// Where the two bracketing trajectories stop agreeing to `1e-6`.
    pub separation_t: f64,
    pub bisection_steps: usize,
    #[serde(skip)]
    pub profile: VProfile,
}

/// Relative agreement required between the two final bracket trajectories.
pub const AGREEMENT: f64 = 1e-6;

/// Bisects a `Crossing`/`Growing` bracket down to width `1e-12 · v0`.
///
/// The candidate is the mean of the two final trajectories up to the point
/// where they separate, continued by the linear decaying solution
/// `c t^{−ν} K_ν(t)` matched in value there.
pub fn find_ground_state(params: &Parameters, bracket: (f64, f64), options: &ShootingOptions) -> Result<Option<GroundState>> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return domain(format!("bracket must satisfy 0 < low < high, got {bracket:?}"));
    }
    let (a, b) = rayon::join(|| integrate_v(params, lo, options), || integrate_v(params, hi, options));
    let (mut a, mut b) = (a?, b?);
    for t in [&a, &b] {
        if t.classification == Classification::Inconclusive {
            return Err(Error::Inconclusive(format!("v0 = {} is inconclusive: {:?}", t.v0, t.diagnostic)));
        }
    }
    if a.classification == b.classification {
        return domain(format!("both bracket ends classify as {:?}", a.classification));
    }
    let mut steps = 0;
    let mut decaying = None;
    for t in [&a, &b] {
        if t.classification == Classification::Decaying {
            decaying = Some(t.clone());
        }
    }
    while decaying.is_none() && hi - lo > 1e-12 * 0.5 * (lo + hi) && steps < 200 {
        let mid = 0.5 * (lo + hi);
        let m = integrate_v(params, mid, options)?;
        steps += 1;
        match m.classification {
            Classification::Decaying => decaying = Some(m),
            Classification::Inconclusive => return Ok(None),
            c if c == a.classification => {
                lo = mid;
                a = m;
            }
            _ => {
                hi = mid;
                b = m;
            }
        }
    }
    if let Some(d) = decaying {
        let separation_t = d.profile.last();
        return Ok(Some(GroundState { v0: d.v0, bracket: (lo, hi), separation_t, bisection_steps: steps, profile: d.profile }));
    }
    let nu = params.nu()?;
    let n = a.profile.len().min(b.profile.len());
    let mut j = 0;
    while j < n {
        let (x, y) = (a.profile.values[j], b.profile.values[j]);
        if (x - y).abs() > AGREEMENT * x.abs().max(y.abs()) {
            break;
        }
        j += 1;
    }
    if j < 2 {
        return Ok(None);
    }
    let grid = log_grid(options.t_min, options.t_max, options.points);
    let mut values = Vec::with_capacity(grid.len());
    let mut derivs = Vec::with_capacity(grid.len());
    for i in 0..j {
        values.push(0.5 * (a.profile.values[i] + b.profile.values[i]));
        derivs.push(0.5 * (a.profile.derivative_values[i] + b.profile.derivative_values[i]));
    }
    let tm = grid[j - 1];
    let c = values[j - 1] / (tm.powf(-nu) * eval_k(nu, tm)?);
    for &t in &grid[j..] {
        values.push(c * t.powf(-nu) * eval_k(nu, t)?);
        derivs.push(-c * t.powf(-nu) * eval_k(nu + 1.0, t)?);
    }
    Ok(Some(GroundState {
        v0: 0.5 * (lo + hi),
        bracket: (lo, hi),
        separation_t: tm,
        bisection_steps: steps,
        profile: VProfile::new(grid, values, derivs)?,
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketScan {
    pub samples: Vec<(f64, Classification)>,
    /// First adjacent pair of samples with different conclusive classes.
    pub bracket: Option<(f64, f64)>,
}

/// Classifies `count` log-spaced initial values in `[lo, hi]` concurrently.
pub fn scan_for_bracket(params: &Parameters, lo: f64, hi: f64, count: usize, options: &ShootingOptions) -> Result<BracketScan> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return domain("scan needs 0 < lo < hi and at least two samples");
    }
    let v0s = log_grid(lo, hi, count);
    let samples: Vec<(f64, Classification)> = v0s
        .par_iter()
        .map(|&v0| integrate_v(params, v0, options).map(|t| (v0, t.classification)))
        .collect::<Result<_>>()?;
    let bracket = samples
        .windows(2)
        .find(|w| {
            let (x, y) = (w[0].1, w[1].1);
            x != y && x != Classification::Inconclusive && y != Classification::Inconclusive
        })
        .map(|w| (w[0].0, w[1].0));
    Ok(BracketScan { samples, bracket })
}
