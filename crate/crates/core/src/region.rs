//! Existence and nonexistence of solutions over the `(α, p)` plane: exact
//! classification, grid scans with optional numerical evidence, and SVG/CSV
//! rendering.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use num::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{check_solution, Check, CheckTolerances};
use crate::error::{domain, Error, Result};
use crate::exact::{self, Rational};
use crate::scaling::{ExactExponents, Parameters};
use crate::shooting::{find_ground_state, scan_for_bracket, ShootingOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    Nonexistence,
    RadialNonexistence,
    ExistenceRadial,
    ExistenceExplicit,
    Open,
}

impl Class {
    pub const ALL: [Class; 5] =
        [Class::Nonexistence, Class::RadialNonexistence, Class::ExistenceRadial, Class::ExistenceExplicit, Class::Open];

    pub fn is_existence(self) -> bool {
        matches!(self, Class::ExistenceRadial | Class::ExistenceExplicit)
    }

    pub fn is_nonexistence(self) -> bool {
        matches!(self, Class::Nonexistence | Class::RadialNonexistence)
    }
}

/// Which result decides the class. Open cells carry `Boundary` when they lie
/// on one of the curves, and no source otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    Terracini,
    CoCrPar,
    PowerLaw,
    SuWangWill,
    PohozaevObstruction,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionClass {
    pub class: Class,
    pub source: Option<Source>,
    pub boundary_note: Option<String>,
}

/// The three critical curves at `α`; `None` where a curve is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    pub two_star: Rational,
    pub two_alpha: Option<Rational>,
    pub two_alpha_star: Option<Rational>,
}

pub fn curves(dim: u32, alpha: &Rational) -> Curves {
    let e = ExactExponents::new(dim, alpha.clone(), exact::int(3));
    Curves { two_star: e.two_star(), two_alpha: e.two_alpha(), two_alpha_star: e.two_alpha_star() }
}

fn boundary_note(dim: u32, alpha: &Rational, p: &Rational) -> Option<String> {
    let c = curves(dim, alpha);
    let n = exact::int(dim as i64);
    let mut on = Vec::new();
    if *p == c.two_star {
        on.push("p = 2*");
    }
    if c.two_alpha.as_ref() == Some(p) {
        on.push("p = 2_alpha");
    }
    if c.two_alpha_star.as_ref() == Some(p) {
        on.push("p = 2_alpha*");
    }
    if *alpha == exact::int(2) {
        on.push("alpha = 2");
    }
    if *alpha == n {
        on.push("alpha = N");
    }
    if *alpha == exact::int(2) * &n - exact::int(2) {
        on.push("alpha = 2N-2");
    }
    (!on.is_empty()).then(|| on.join(", "))
}

/// Exact classification of `(α, p)`; rules are tried in a fixed order so
/// overlapping statements resolve the same way every time.
pub fn classify_exact(dim: u32, alpha: &Rational, p: &Rational) -> Result<RegionClass> {
    if dim < 3 {
        return domain(format!("N must be at least 3, got {dim}"));
    }
    if !alpha.is_positive() {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let two = exact::int(2);
    if *p <= two {
        return domain(format!("p must exceed 2, got {p}"));
    }
    let n = exact::int(dim as i64);
    let c = curves(dim, alpha);
    let note = boundary_note(dim, alpha, p);
    let done = |class, source| Ok(RegionClass { class, source, boundary_note: note.clone() });
    let a_lt_2 = *alpha < two;
    let a_gt_2 = *alpha > two;

    if *alpha == two && *p == c.two_star {
        return done(Class::ExistenceExplicit, Some(Source::Terracini));
    }
    if (*alpha == two) != (*p == c.two_star) {
        return done(Class::Nonexistence, Some(Source::Terracini));
    }
    if (a_lt_2 && *p > c.two_star) || (a_gt_2 && *p < c.two_star) {
        return done(Class::Nonexistence, Some(Source::CoCrPar));
    }
    if let Some(ta) = &c.two_alpha {
        if (a_lt_2 && p <= ta) || (a_gt_2 && *alpha < n && p >= ta) {
            return done(Class::Nonexistence, Some(Source::PowerLaw));
        }
    }
    let tas = c.two_alpha_star.as_ref();
    if a_lt_2 && tas.is_some_and(|s| p <= s) {
        return done(Class::RadialNonexistence, Some(Source::PohozaevObstruction));
    }
    let k = &two * &n - &two;
    let sww = (a_lt_2 && tas.is_some_and(|s| p > s) && *p < c.two_star)
        || (a_gt_2 && *alpha < k && *p > c.two_star && tas.is_some_and(|s| p < s))
        || (*alpha >= k && *p > c.two_star);
    if sww {
        return done(Class::ExistenceRadial, Some(Source::SuWangWill));
    }
    let source = note.is_some().then_some(Source::Boundary);
    done(Class::Open, source)
}

/// Classification of floating inputs through their shortest decimal form.
pub fn classify(dim: u32, alpha: f64, p: f64) -> Result<RegionClass> {
    classify_exact(dim, &exact::from_f64(alpha)?, &exact::from_f64(p)?)
}

/// A strictly increasing list of exact axis values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis(pub Vec<Rational>);

impl Axis {
    /// `start, start+step, …` up to and including `stop`.
    pub fn stepped(start: &Rational, stop: &Rational, step: &Rational) -> Result<Self> {
        if !step.is_positive() || stop < start {
            return domain(format!("bad axis {start}:{stop}:{step}"));
        }
        let mut out = Vec::new();
        let mut k = 0i64;
        loop {
            let x = start + step * exact::int(k);
            if x > *stop {
                break;
            }
            out.push(x);
            k += 1;
            if k > 1_000_000 {
                return domain("axis has more than a million points");
            }
        }
        Ok(Self(out))
    }

    /// Midpoints of `n` equal cells of `(lo, hi)`.
    pub fn centers(lo: &Rational, hi: &Rational, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("resolution must be at least 1");
        }
        if hi <= lo {
            return domain(format!("empty range ({lo}, {hi})"));
        }
        let width = (hi - lo) / exact::int(2 * n as i64);
        Ok(Self((0..n).map(|i| lo + &width * exact::int(2 * i as i64 + 1)).collect()))
    }

    /// `"a:b:s"` with exact decimals or fractions.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [x] => Ok(Self(vec![exact::parse(x)?])),
            [a, b, s] => Self::stepped(&exact::parse(a)?, &exact::parse(b)?, &exact::parse(s)?),
            _ => Err(Error::Parse(format!("expected start:stop:step, got {text:?}"))),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(exact::to_f64).collect()
    }

    /// Drops points that leave the domain (`α ≤ 0`, `p ≤ 2`).
    pub fn above(self, bound: &Rational) -> Self {
        Self(self.0.into_iter().filter(|x| x > bound).collect())
    }
}

/// Profile resolution for per-cell numerics. Large `κ` makes the profiles
/// steep in `ln t`, and the finite-difference residual needs the finer grid.
pub const NUMERICS_POINTS: usize = 8192;

#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub dim: u32,
    pub alpha: Axis,
    pub p: Axis,
    pub with_numerics: bool,
    /// Wall-clock budget per cell for the numerics.
    pub cell_timeout: Duration,
    pub shooting: ShootingOptions,
}

impl ScanSpec {
    pub fn new(dim: u32, alpha: Axis, p: Axis) -> Self {
        Self {
            dim,
            alpha,
            p,
            with_numerics: false,
            cell_timeout: Duration::from_secs(30),
            shooting: ShootingOptions { points: NUMERICS_POINTS, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvidenceStatus {
    /// The numerics are consistent with the analytic class.
    Agree,
    Disagree,
    /// The numerics decide nothing for this class (open cells, failed runs).
    Inconclusive,
    /// No numerics for `α ≥ 2`, where the Bessel form is unavailable.
    Skipped,
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEvidence {
    pub status: EvidenceStatus,
    /// A bracket was found and bisection produced a candidate.
    pub candidate: bool,
    /// The candidate passed every solution check.
    pub verified: bool,
    pub failed_checks: Vec<Check>,
    pub v0: Option<f64>,
    pub elapsed_ms: u64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionMap {
    pub dim: u32,
    pub alpha_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    /// `cells[i][j]` belongs to `(alpha_grid[i], p_grid[j])`.
    pub cells: Vec<Vec<RegionClass>>,
    pub evidence: Option<Vec<Vec<CellEvidence>>>,
}

impl RegionMap {
    pub fn count(&self, class: Class) -> usize {
        self.cells.iter().flatten().filter(|c| c.class == class).count()
    }

    pub fn timed_out(&self) -> usize {
        self.evidence
            .iter()
            .flatten()
            .flatten()
            .filter(|e| e.status == EvidenceStatus::TimedOut)
            .count()
    }
}

pub fn scan_grid(spec: &ScanSpec) -> Result<RegionMap> {
    if spec.alpha.0.is_empty() || spec.p.0.is_empty() {
        return domain("resolution 0: empty alpha or p axis");
    }
    for axis in [&spec.alpha, &spec.p] {
        if axis.0.windows(2).any(|w| w[0] >= w[1]) {
            return domain("axis values must be strictly increasing");
        }
    }
    let (na, np) = (spec.alpha.0.len(), spec.p.0.len());
    let flat: Vec<RegionClass> = (0..na * np)
        .into_par_iter()
        .map(|k| classify_exact(spec.dim, &spec.alpha.0[k / np], &spec.p.0[k % np]))
        .collect::<Result<_>>()?;
    let evidence = if spec.with_numerics {
        // cells block on their own worker threads, so they get a pool apart
        // from the global one used inside each cell
        let pool = rayon::ThreadPoolBuilder::new()
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        let ev: Vec<CellEvidence> = pool.install(|| {
            (0..na * np)
                .into_par_iter()
                .map(|k| cell_numerics(spec, &spec.alpha.0[k / np], &spec.p.0[k % np], flat[k].class))
                .collect()
        });
        Some(ev.chunks(np).map(|c| c.to_vec()).collect())
    } else {
        None
    };
    Ok(RegionMap {
        dim: spec.dim,
        alpha_grid: spec.alpha.values(),
        p_grid: spec.p.values(),
        cells: flat.chunks(np).map(|c| c.to_vec()).collect(),
        evidence,
    })
}

struct Numerics {
    candidate: bool,
    verified: bool,
    failed: Vec<Check>,
    v0: Option<f64>,
    note: String,
}

fn run_numerics(params: &Parameters, opts: &ShootingOptions) -> Result<Numerics> {
    let scan = scan_for_bracket(params, 1e-3, 1e3, 13, opts)?;
    let Some(bracket) = scan.bracket else {
        let classes: Vec<String> = scan.samples.iter().map(|(_, c)| format!("{c:?}")).collect();
        return Ok(Numerics {
            candidate: false,
            verified: false,
            failed: vec![],
            v0: None,
            note: format!("no bracket; samples {}", classes.join(",")),
        });
    };
    let Some(gs) = find_ground_state(params, bracket, opts)? else {
        return Ok(Numerics { candidate: false, verified: false, failed: vec![], v0: None, note: "bisection was inconclusive".into() });
    };
    let report = check_solution(params, &gs.profile, &CheckTolerances::default())?;
    Ok(Numerics { candidate: true, verified: report.pass, failed: report.failed, v0: Some(gs.v0), note: String::new() })
}

fn cell_numerics(spec: &ScanSpec, alpha: &Rational, p: &Rational, class: Class) -> CellEvidence {
    let start = Instant::now();
    let mut ev = CellEvidence {
        status: EvidenceStatus::Skipped,
        candidate: false,
        verified: false,
        failed_checks: vec![],
        v0: None,
        elapsed_ms: 0,
        note: String::new(),
    };
    if *alpha >= exact::int(2) {
        ev.note = "no Bessel form for alpha >= 2".into();
        return ev;
    }
    let params = match Parameters::with_exact(spec.dim, 1.0, alpha.clone(), p.clone()) {
        Ok(q) => q,
        Err(e) => {
            ev.status = EvidenceStatus::Inconclusive;
            ev.note = e.to_string();
            return ev;
        }
    };
    let (tx, rx) = mpsc::channel();
    let opts = spec.shooting;
    // the worker is abandoned on timeout; its result is simply dropped
    std::thread::spawn(move || {
        let _ = tx.send(run_numerics(&params, &opts));
    });
    let outcome = rx.recv_timeout(spec.cell_timeout);
    ev.elapsed_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Err(_) => {
            ev.status = EvidenceStatus::TimedOut;
            ev.note = format!("exceeded {:?}", spec.cell_timeout);
        }
        Ok(Err(e)) => {
            ev.status = EvidenceStatus::Inconclusive;
            ev.note = e.to_string();
        }
        Ok(Ok(n)) => {
            ev.candidate = n.candidate;
            ev.verified = n.verified;
            ev.failed_checks = n.failed;
            ev.v0 = n.v0;
            ev.note = n.note;
            ev.status = match (class.is_existence(), class.is_nonexistence(), n.verified) {
                (true, _, true) | (_, true, false) => EvidenceStatus::Agree,
                (true, _, false) => EvidenceStatus::Inconclusive,
                (_, true, true) => EvidenceStatus::Disagree,
                _ => EvidenceStatus::Inconclusive,
            };
        }
    }
    ev
}

#[derive(Serialize)]
struct CsvRow<'a> {
    alpha: f64,
    p: f64,
    class: Class,
    source: Option<Source>,
    boundary_note: &'a str,
    evidence: Option<EvidenceStatus>,
    candidate: Option<bool>,
    verified: Option<bool>,
    failed_checks: String,
}

pub fn write_csv<W: Write>(map: &RegionMap, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, row) in map.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let ev = map.evidence.as_ref().map(|e| &e[i][j]);
            w.serialize(CsvRow {
                alpha: map.alpha_grid[i],
                p: map.p_grid[j],
                class: cell.class,
                source: cell.source,
                boundary_note: cell.boundary_note.as_deref().unwrap_or(""),
                evidence: ev.map(|e| e.status),
                candidate: ev.map(|e| e.candidate),
                verified: ev.map(|e| e.verified),
                failed_checks: ev
                    .map(|e| e.failed_checks.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(";"))
                    .unwrap_or_default(),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Metadata stored next to a CSV map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub dim: u32,
    pub alpha: String,
    pub p: String,
    pub with_numerics: bool,
    pub cell_timeout_s: f64,
    pub counts: Vec<(Class, usize)>,
    pub timed_out: usize,
}

pub fn sidecar(map: &RegionMap, alpha: &str, p: &str, spec: &ScanSpec) -> Sidecar {
    Sidecar {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        dim: map.dim,
        alpha: alpha.into(),
        p: p.into(),
        with_numerics: spec.with_numerics,
        cell_timeout_s: spec.cell_timeout.as_secs_f64(),
        counts: Class::ALL.iter().map(|c| (*c, map.count(*c))).collect(),
        timed_out: map.timed_out(),
    }
}

pub fn save_csv(map: &RegionMap, path: impl AsRef<Path>, side: &Sidecar) -> Result<()> {
    let path = path.as_ref();
    write_csv(map, std::fs::File::create(path)?)?;
    let json = serde_json::to_string_pretty(side)?;
    std::fs::write(path.with_extension("json"), json)?;
    Ok(())
}

const LIGHT: &str = "#d0d0d0";
const DARK: &str = "#606060";

/// Cell boundaries halfway between grid points, extended by half a step.
fn edges(xs: &[f64]) -> Vec<f64> {
    if xs.len() == 1 {
        return vec![xs[0] - 0.5, xs[0] + 0.5];
    }
    let mut e = Vec::with_capacity(xs.len() + 1);
    e.push(xs[0] - 0.5 * (xs[1] - xs[0]));
    for w in xs.windows(2) {
        e.push(0.5 * (w[0] + w[1]));
    }
    let n = xs.len();
    e.push(xs[n - 1] + 0.5 * (xs[n - 1] - xs[n - 2]));
    e
}

pub fn render_svg(map: &RegionMap) -> Result<String> {
    if map.cells.is_empty() || map.cells[0].is_empty() {
        return domain("empty map");
    }
    let (w, h, pad) = (640.0, 480.0, 50.0);
    let ae = edges(&map.alpha_grid);
    let pe = edges(&map.p_grid);
    let (a0, a1) = (ae[0], ae[ae.len() - 1]);
    let (p0, p1) = (pe[0], pe[pe.len() - 1]);
    let x = |a: f64| pad + (a - a0) / (a1 - a0) * (w - 2.0 * pad);
    let y = |p: f64| h - pad - (p - p0) / (p1 - p0) * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(
        s,
        r##"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><rect width="6" height="6" fill="{LIGHT}"/><line x1="0" y1="0" x2="0" y2="6" stroke="#303030" stroke-width="1.2"/></pattern><clipPath id="plot"><rect x="{pad}" y="{pad}" width="{}" height="{}"/></clipPath></defs>"##,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (i, row) in map.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let fill = match cell.class {
                Class::Nonexistence => LIGHT,
                Class::RadialNonexistence => "url(#hatch)",
                Class::ExistenceRadial | Class::ExistenceExplicit => DARK,
                Class::Open => "white",
            };
            let (xl, xr) = (x(ae[i]), x(ae[i + 1]));
            let (yt, yb) = (y(pe[j + 1]), y(pe[j]));
            let _ = writeln!(
                s,
                r#"<rect x="{xl:.2}" y="{yt:.2}" width="{:.2}" height="{:.2}" fill="{fill}"><title>alpha={} p={} {:?}</title></rect>"#,
                xr - xl,
                yb - yt,
                map.alpha_grid[i],
                map.p_grid[j],
                cell.class
            );
        }
    }
    let n = map.dim as f64;
    let samples = 400;
    let curve = |f: &dyn Fn(f64) -> Option<f64>, color: &str, label: &str, s: &mut String| {
        let mut d = String::new();
        let mut pen = false;
        for k in 0..=samples {
            let a = a0 + (a1 - a0) * k as f64 / samples as f64;
            match f(a).filter(|p| p.is_finite() && *p >= p0 && *p <= p1) {
                Some(p) => {
                    let _ = write!(d, "{}{:.2},{:.2} ", if pen { "L" } else { "M" }, x(a), y(p));
                    pen = true;
                }
                None => pen = false,
            }
        }
        if !d.is_empty() {
            let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5" clip-path="url(#plot)"><title>{label}</title></path>"#);
        }
    };
    curve(&|_| Some(2.0 * n / (n - 2.0)), "black", "p = 2*", &mut s);
    curve(&|a| (a < n).then(|| 2.0 * n / (n - a)), "#1f4e9c", "p = 2_alpha", &mut s);
    curve(&|a| (a < 2.0 * n - 2.0).then(|| 2.0 * (2.0 * n - 2.0 + a) / (2.0 * n - 2.0 - a)), "#b03030", "p = 2_alpha*", &mut s);
    let _ = writeln!(s, r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#, w - 2.0 * pad, h - 2.0 * pad);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">alpha</text>"#, w / 2.0, h - 15.0);
    let _ = writeln!(s, r#"<text x="15" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 15 {})">p</text>"#, h / 2.0, h / 2.0);
    for (v, anchor_x) in [(a0, x(a0)), (a1, x(a1))] {
        let _ = writeln!(s, r#"<text x="{anchor_x:.1}" y="{}" font-size="11" text-anchor="middle">{v:.3}</text>"#, h - pad + 14.0);
    }
    for (v, anchor_y) in [(p0, y(p0)), (p1, y(p1))] {
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">{v:.3}</text>"#, pad - 4.0, anchor_y + 4.0);
    }
    let _ = writeln!(s, "<desc>N = {}</desc>", map.dim);
    s.push_str("</svg>\n");
    Ok(s)
}

/// `2 < 2_α < 2_α* < 2*` for `0 < α < 2` and `2* < 2_α*` for `2 < α < 2N−2`.
pub fn curve_ordering_holds(dim: u32, alpha: &Rational) -> bool {
    let two = exact::int(2);
    let c = curves(dim, alpha);
    let k = exact::int(2 * dim as i64 - 2);
    if alpha.is_positive() && *alpha < two {
        match (&c.two_alpha, &c.two_alpha_star) {
            (Some(a), Some(s)) => two < *a && a < s && *s < c.two_star,
            _ => false,
        }
    } else if *alpha > two && *alpha < k {
        c.two_alpha_star.is_some_and(|s| c.two_star < s)
    } else {
        true
    }
}

/// Whether the three curves coincide at `α = 2`.
pub fn curves_meet_at_two(dim: u32) -> bool {
    let c = curves(dim, &exact::int(2));
    c.two_alpha.as_ref() == Some(&c.two_star) && c.two_alpha_star.as_ref() == Some(&c.two_star) && !c.two_star.is_zero()
}
