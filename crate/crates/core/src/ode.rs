//! Dormand–Prince 5(4) with step-size control and Hermite dense output.

use crate::error::{domain, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, initial_step: 0.0, max_step: f64::INFINITY, max_steps: 1_000_000 }
    }
}

/// An accepted step `[t0, t1]` with states and slopes at both ends.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub f0: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolant of component `k` and its derivative.
    pub fn interpolate(&self, k: usize, t: f64) -> (f64, f64) {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let (y0, y1, m0, m1) = (self.y0[k], self.y1[k], self.f0[k] * h, self.f1[k] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1;
        let slope = ((6.0 * s2 - 6.0 * s) * y0 + (3.0 * s2 - 4.0 * s + 1.0) * m0 + (-6.0 * s2 + 6.0 * s) * y1 + (3.0 * s2 - 2.0 * s) * m1) / h;
        (value, slope)
    }

    /// Quintic Hermite interpolant of a component `k` whose derivative is
    /// component `k + 1` (a second-order equation written as a system).
    /// Returns value and first derivative.
    pub fn interpolate_second_order(&self, k: usize, t: f64) -> (f64, f64) {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let (p0, p1) = (self.y0[k], self.y1[k]);
        let (d0, d1) = (self.y0[k + 1] * h, self.y1[k + 1] * h);
        let (a0, a1) = (self.f0[k + 1] * h * h, self.f1[k + 1] * h * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        let h3 = 0.5 * s3 - s4 + 0.5 * s5;
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let dh0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let dh1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let dh2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
        let dh3 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
        let dh4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let dh5 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
        let value = h0 * p0 + h1 * d0 + h2 * a0 + h3 * a1 + h4 * d1 + h5 * p1;
        let slope = (dh0 * p0 + dh1 * d0 + dh2 * a0 + dh3 * a1 + dh4 * d1 + dh5 * p1) / h;
        (value, slope)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached the final time.
    Completed,
    /// The observer asked to stop.
    Stopped,
    /// The step size fell below the resolution of `t`.
    StepUnderflow,
    /// The state or its slope became non-finite.
    NonFinite,
    MaxSteps,
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome<const N: usize> {
    pub termination: Termination,
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub rejected: usize,
}

fn norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], o: &Dopri5Options) -> f64 {
    let mut s = 0.0;
    for k in 0..N {
        let sc = o.atol + o.rtol * y0[k].abs().max(y1[k].abs());
        s += (err[k] / sc).powi(2);
    }
    (s / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end > t0`, reporting every
/// accepted step to `observer`.
pub fn integrate<const N: usize, F, O>(f: F, t0: f64, y0: [f64; N], t_end: f64, opts: &Dopri5Options, mut observer: O) -> Result<Outcome<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Step<N>) -> Control,
{
    if !(t_end > t0) || !t0.is_finite() || !t_end.is_finite() {
        return domain(format!("integration interval [{t0}, {t_end}] is empty or not finite"));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return domain("tolerances must be positive");
    }
    let mut t = t0;
    let mut y = y0;
    let mut fy = f(t, &y);
    let mut h = if opts.initial_step > 0.0 {
        opts.initial_step
    } else {
        // a cautious first guess, refined by the controller
        let scale = norm(&fy, &y, &y, opts).max(1e-10);
        (0.01 / scale).min(0.01 * (t_end - t0)).max(1e-6 * (t_end - t0).min(t.abs().max(1e-300)))
    };
    let (mut steps, mut rejected) = (0, 0);
    let mut k = [[0.0; N]; 7];
    loop {
        if steps >= opts.max_steps {
            return Ok(Outcome { termination: Termination::MaxSteps, t, y, steps, rejected });
        }
        h = h.min(opts.max_step).min(t_end - t);
        if h <= 4.0 * f64::EPSILON * t.abs().max(1e-300) {
            return Ok(Outcome { termination: Termination::StepUnderflow, t, y, steps, rejected });
        }
        k[0] = fy;
        let mut y1 = y;
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                *yi += h * acc;
            }
            k[s] = f(t + C[s] * h, &ys);
            y1 = ys;
        }
        let mut err = [0.0; N];
        for (i, e) in err.iter_mut().enumerate() {
            *e = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
        }
        // the seventh stage is evaluated at y1 (first-same-as-last)
        let f1 = k[6];
        if y1.iter().chain(&f1).any(|x| !x.is_finite()) {
            if h < 1e-12 * t.abs().max(1.0) {
                return Ok(Outcome { termination: Termination::NonFinite, t, y, steps, rejected });
            }
            h *= 0.25;
            rejected += 1;
            continue;
        }
        let en = norm(&err, &y, &y1, opts);
        if en <= 1.0 {
            let step = Step { t0: t, t1: t + h, y0: y, y1, f0: fy, f1 };
            steps += 1;
            t += h;
            y = y1;
            fy = f1;
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            let control = observer(&step);
            if control == Control::Stop {
                return Ok(Outcome { termination: Termination::Stopped, t, y, steps, rejected });
            }
            if t >= t_end {
                return Ok(Outcome { termination: Termination::Completed, t, y, steps, rejected });
            }
            h *= fac;
        } else {
            rejected += 1;
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
}

/// Root of `g` in `[a, b]` by bisection, assuming `g(a)` and `g(b)` differ in sign.
pub fn bisect_root(mut a: f64, mut b: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
